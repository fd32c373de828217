//! Differentiates the classifier's logits with the parameter-shift rule and
//! checks a few coordinates against central finite differences.
//!
//! Run with: cargo run --release --example parameter_shift

use qunlearn::circuit::CircuitSpec;
use qunlearn::training::{initial_params, parameter_shift_gradient};

fn main() -> qunlearn::Result<()> {
    let spec = CircuitSpec::default();
    let params = initial_params(0.05, 7);
    let x = [0.3, 1.1, 2.0, 0.7];

    // Gradient of the class-0 logit w.r.t. all 72 circuit parameters.
    let grad = parameter_shift_gradient(|w| Ok(spec.logits(w, &x)?[0]), &params)?;

    println!("‖∇z₀‖₂ = {:.6}", grad.iter().map(|g| g * g).sum::<f64>().sqrt());
    println!("{:>5} {:>15} {:>15} {:>12}", "coord", "param-shift", "finite-diff", "|diff|");
    let h = 1e-6;
    for i in [0, 17, 35, 54, 71] {
        let mut wp = params.clone();
        let mut wm = params.clone();
        wp[i] += h;
        wm[i] -= h;
        let fd = (spec.logits(&wp, &x)?[0] - spec.logits(&wm, &x)?[0]) / (2.0 * h);
        println!(
            "{:>5} {:>15.10} {:>15.10} {:>12.3e}",
            i,
            grad[i],
            fd,
            (grad[i] - fd).abs()
        );
    }
    Ok(())
}
