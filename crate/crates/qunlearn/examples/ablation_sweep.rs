//! Sweeps the anchor weight α on Covertype (forgetting class 1, as in the
//! class-wise study) and prints how retained accuracy and leftover forget
//! probability move along the axis.
//!
//! Run with: cargo run --release --example ablation_sweep

use qunlearn::circuit::CircuitSpec;
use qunlearn::config::{DatasetKind, RunConfig};
use qunlearn::pipeline::{ablation_sweep, prepare_data, SweepAxis};
use qunlearn::training::train;

fn main() -> qunlearn::Result<()> {
    let mut config = RunConfig {
        dataset: DatasetKind::Covertype,
        seed: 0,
        forget_class: Some(1),
        ..RunConfig::default()
    };
    config.propagate_seed();

    let prepared = prepare_data(&config)?;
    let spec = CircuitSpec::default();
    let model = train(&spec, &prepared.dataset, &prepared.partition, &config.train)?;

    let axis = SweepAxis::Alpha;
    println!("sweeping {} over {:?}", axis.name(), axis.values());
    let settings = ablation_sweep(&config, &model.params, axis)?;

    println!(
        "{:>8} {:>12} {:>15} {:>12} {:>13}",
        "alpha", "overall_acc", "retained_acc", "forget_prob", "forget_recall"
    );
    for setting in &settings {
        let row = &setting.row;
        println!(
            "{:>8.2} {:>12.4} {:>15.4} {:>12.4} {:>13.4}",
            row.value, row.overall_accuracy, row.retained_accuracy, row.forget_prob, row.forget_recall
        );
    }
    Ok(())
}
