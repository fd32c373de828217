//! Trains the six-qubit classifier on Iris and reports loss curves and test
//! accuracy. Uses the same pipeline as `qunlearn train --dataset iris`.
//!
//! Run with: cargo run --release --example train_iris

use qunlearn::circuit::CircuitSpec;
use qunlearn::config::{DatasetKind, RunConfig};
use qunlearn::evaluation::{accuracy, classwise_recall, confusion_matrix};
use qunlearn::pipeline::{prepare_data, select_rows};
use qunlearn::training::train;

fn main() -> qunlearn::Result<()> {
    let mut config = RunConfig {
        dataset: DatasetKind::Iris,
        seed: 0,
        ..RunConfig::default()
    };
    config.propagate_seed();

    let prepared = prepare_data(&config)?;
    let spec = CircuitSpec::default();
    let model = train(&spec, &prepared.dataset, &prepared.partition, &config.train)?;

    println!("iteration  train_loss  val_loss");
    for (iteration, record) in model.history.iter().enumerate().step_by(30) {
        println!(
            "{:>9}  {:>10.6}  {:>8.6}",
            iteration, record.train_loss, record.val_loss
        );
    }
    println!("best validation loss at iteration {}", model.best_iteration);

    let (test_x, test_y) = select_rows(&prepared.dataset, &prepared.partition.test);
    let cm = confusion_matrix(&spec, &model.params, &test_x, &test_y)?;
    let recall = classwise_recall(&cm)?;
    println!("test accuracy {:.4}", accuracy(&cm));
    println!(
        "class recalls [{:.3} {:.3} {:.3}]",
        recall[0], recall[1], recall[2]
    );
    Ok(())
}
