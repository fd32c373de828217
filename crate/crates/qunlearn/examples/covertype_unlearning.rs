//! End-to-end Covertype workflow: train the original model, retrain the gold
//! baseline without the forgotten class, unlearn, and print the evaluation
//! report comparing all three — the library-API equivalent of running the
//! train/gold/unlearn/eval subcommands in sequence.
//!
//! Run with: cargo run --release --example covertype_unlearning

use qunlearn::circuit::CircuitSpec;
use qunlearn::config::{DatasetKind, RunConfig};
use qunlearn::evaluation::KlDirection;
use qunlearn::pipeline::{evaluate, prepare_data};
use qunlearn::training::{train, train_gold};
use qunlearn::unlearning::unlearn;

fn main() -> qunlearn::Result<()> {
    let mut config = RunConfig {
        dataset: DatasetKind::Covertype,
        seed: 0,
        forget_class: Some(2),
        ..RunConfig::default()
    };
    config.propagate_seed();

    let prepared = prepare_data(&config)?;
    let (dataset, partition) = (&prepared.dataset, &prepared.partition);
    let spec = CircuitSpec::default();

    println!("training original model ({} rows)...", partition.train.len());
    let original = train(&spec, dataset, partition, &config.train)?;
    println!(
        "retraining gold baseline ({} rows)...",
        partition.train.len() - partition.forget.len()
    );
    let gold = train_gold(&spec, dataset, partition, &config.train)?;
    println!("unlearning class {}...", config.forget_class.expect("set"));
    let unlearned = unlearn(&spec, dataset, partition, &original.params, &config.unlearn)?;

    let report = evaluate(
        &spec,
        &prepared,
        &original.params,
        &unlearned.params,
        &gold.params,
        KlDirection::GoldVsUnlearned,
    )?;
    print!("{}", report.render_text());
    Ok(())
}
