//! Builds a Bell pair and a GHZ state with the gate kernels, prints the
//! amplitudes, and reads out per-qubit ⟨Z⟩ expectations.
//!
//! Run with: cargo run --release --example statevector_basics

use std::f64::consts::FRAC_PI_2;

use qunlearn::statevector::StateVector;

fn show(label: &str, state: &StateVector) {
    println!("{label}:");
    for (i, amp) in state.amplitudes().iter().enumerate() {
        if amp.norm_sqr() > 1e-18 {
            println!("  |{:0width$b}⟩  {:+.6} {:+.6}i", i, amp.re, amp.im, width = state.n_qubits());
        }
    }
    for q in 0..state.n_qubits() {
        println!(
            "  ⟨Z_{q}⟩ = {:+.6}",
            state.expectation_z(q).expect("qubit in range")
        );
    }
}

fn main() -> qunlearn::Result<()> {
    // RY(π/2) puts qubit 0 on the equator; CX(0,1) entangles: (|00⟩+|11⟩)/√2.
    let mut bell = StateVector::zero_state(2)?;
    bell.apply_ry(0, FRAC_PI_2)?;
    bell.apply_cx(0, 1)?;
    show("Bell pair", &bell);

    let mut ghz = StateVector::zero_state(3)?;
    ghz.apply_ry(0, FRAC_PI_2)?;
    ghz.apply_cx(0, 1)?;
    ghz.apply_cx(1, 2)?;
    show("GHZ state", &ghz);

    println!("norm check: ‖ψ‖² − 1 = {:+e}", ghz.norm_sqr() - 1.0);
    Ok(())
}
