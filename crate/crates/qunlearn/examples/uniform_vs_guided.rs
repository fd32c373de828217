//! Compares the similarity-guided forget target against the uniform baseline
//! on the same trained Covertype checkpoint: same optimizer, same budget,
//! only the target distribution differs.
//!
//! Run with: cargo run --release --example uniform_vs_guided

use qunlearn::circuit::CircuitSpec;
use qunlearn::config::{DatasetKind, RunConfig};
use qunlearn::evaluation::{classwise_recall, confusion_matrix, mean_forget_prob};
use qunlearn::pipeline::{prepare_data, select_rows};
use qunlearn::training::train;
use qunlearn::unlearning::{unlearn, TargetSource, UnlearnConfig};

fn main() -> qunlearn::Result<()> {
    let forget_class = 2;
    let mut config = RunConfig {
        dataset: DatasetKind::Covertype,
        seed: 0,
        forget_class: Some(forget_class),
        ..RunConfig::default()
    };
    config.propagate_seed();

    let prepared = prepare_data(&config)?;
    let (dataset, partition) = (&prepared.dataset, &prepared.partition);
    let spec = CircuitSpec::default();
    let model = train(&spec, dataset, partition, &config.train)?;

    let (test_x, test_y) = select_rows(dataset, &partition.test);
    let forget_x: Vec<Vec<f64>> = partition
        .test
        .iter()
        .filter(|&&i| dataset.labels[i] == forget_class)
        .map(|&i| dataset.features[i].clone())
        .collect();
    let pf0 = mean_forget_prob(&spec, &model.params, &forget_x, forget_class)?;
    println!("trained checkpoint: mean p(forgotten) on forgotten-class test rows = {pf0:.4}");

    for source in [TargetSource::SimilarityGuided, TargetSource::Uniform] {
        let ucfg = UnlearnConfig {
            target_source: source,
            ..config.unlearn.clone()
        };
        let result = unlearn(&spec, dataset, partition, &model.params, &ucfg)?;
        let pf = mean_forget_prob(&spec, &result.params, &forget_x, forget_class)?;
        let cm = confusion_matrix(&spec, &result.params, &test_x, &test_y)?;
        let recall = classwise_recall(&cm)?;
        println!(
            "{:?}: q = [{:.3} {:.3} {:.3}]  p(forgotten) {:.4} → {:.4}  recalls [{:.3} {:.3} {:.3}]",
            source,
            result.target.q[0],
            result.target.q[1],
            result.target.q[2],
            pf0,
            pf,
            recall[0],
            recall[1],
            recall[2]
        );
    }
    Ok(())
}
