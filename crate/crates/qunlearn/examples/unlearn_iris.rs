//! Trains on Iris, forgets the virginica class with the distribution-guided
//! objective, and prints before/after recalls and forget probabilities.
//!
//! Run with: cargo run --release --example unlearn_iris

use qunlearn::circuit::CircuitSpec;
use qunlearn::config::{DatasetKind, RunConfig};
use qunlearn::evaluation::{classwise_recall, confusion_matrix, mean_forget_prob};
use qunlearn::pipeline::{prepare_data, select_rows};
use qunlearn::training::train;
use qunlearn::unlearning::unlearn;

fn main() -> qunlearn::Result<()> {
    let forget_class = 2;
    let mut config = RunConfig {
        dataset: DatasetKind::Iris,
        seed: 1,
        forget_class: Some(forget_class),
        ..RunConfig::default()
    };
    config.propagate_seed();

    let prepared = prepare_data(&config)?;
    let (dataset, partition) = (&prepared.dataset, &prepared.partition);
    let spec = CircuitSpec::default();

    let model = train(&spec, dataset, partition, &config.train)?;
    let result = unlearn(&spec, dataset, partition, &model.params, &config.unlearn)?;

    println!(
        "guided target q = [{:.4} {:.4} {:.4}] (β = {})",
        result.target.q[0], result.target.q[1], result.target.q[2], result.target.beta
    );
    println!(
        "objective {:.4} → {:.4} over {} ascent steps",
        result.objective_history.first().expect("non-empty"),
        result.objective_history.last().expect("non-empty"),
        result.objective_history.len()
    );

    let (test_x, test_y) = select_rows(dataset, &partition.test);
    let forget_x: Vec<Vec<f64>> = partition
        .test
        .iter()
        .filter(|&&i| dataset.labels[i] == forget_class)
        .map(|&i| dataset.features[i].clone())
        .collect();

    for (label, params) in [("before", &model.params), ("after ", &result.params)] {
        let cm = confusion_matrix(&spec, params, &test_x, &test_y)?;
        let recall = classwise_recall(&cm)?;
        let pf = mean_forget_prob(&spec, params, &forget_x, forget_class)?;
        println!(
            "{label}: recalls [{:.3} {:.3} {:.3}]  mean p(forgotten) {:.4}",
            recall[0], recall[1], recall[2], pf
        );
    }

    let max_delta = result.param_delta.iter().cloned().fold(0.0, f64::max);
    println!("max |Δw| = {max_delta:.4}");
    Ok(())
}
