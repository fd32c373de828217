//! Forgetting-quality evaluation: confusion matrices, class-wise recall,
//! forgotten-class confidence, renormalized KL divergence against the gold
//! retrained model, and parameter-change summaries.

use serde::Serialize;

use crate::circuit::{argmax, CircuitSpec, N_CLASSES};
use crate::error::{Error, Result};
use crate::training::PROB_FLOOR;

/// Counts of (true class, predicted class) pairs; rows are true labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub counts: [[usize; N_CLASSES]; N_CLASSES],
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, class: usize) -> usize {
        self.counts[class].iter().sum()
    }

    /// Comma-separated integer grid, one row per true class.
    pub fn to_csv(&self) -> String {
        self.counts
            .iter()
            .map(|row| {
                row.iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Tallies true/predicted label pairs.
pub fn confusion_from_predictions(
    true_labels: &[usize],
    predicted: &[usize],
) -> Result<ConfusionMatrix> {
    if true_labels.is_empty() || true_labels.len() != predicted.len() {
        return Err(Error::InvalidArgument(format!(
            "need matching non-empty label sequences, got {}/{}",
            true_labels.len(),
            predicted.len()
        )));
    }
    let mut counts = [[0; N_CLASSES]; N_CLASSES];
    for (&t, &p) in true_labels.iter().zip(predicted) {
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// Runs the classifier on every test sample and tallies argmax predictions
/// (ties resolve to the lowest class index).
pub fn confusion_matrix(
    spec: &CircuitSpec,
    params: &[f64],
    features: &[Vec<f64>],
    labels: &[usize],
) -> Result<ConfusionMatrix> {
    let predicted = features
        .iter()
        .map(|x| Ok(argmax(&spec.predict_proba(params, x)?)))
        .collect::<Result<Vec<_>>>()?;
    confusion_from_predictions(labels, &predicted)
}

/// Fraction of all test samples predicted correctly.
pub fn accuracy(cm: &ConfusionMatrix) -> f64 {
    let correct: usize = (0..N_CLASSES).map(|k| cm.counts[k][k]).sum();
    correct as f64 / cm.total() as f64
}

/// Accuracy over the rows whose true class is retained (≠ `forget_class`).
pub fn retained_accuracy(cm: &ConfusionMatrix, forget_class: usize) -> Result<f64> {
    let mut correct = 0;
    let mut total = 0;
    for class in (0..N_CLASSES).filter(|&k| k != forget_class) {
        correct += cm.counts[class][class];
        total += cm.row_sum(class);
    }
    if total == 0 {
        return Err(Error::InvalidArgument(
            "no retained-class test samples".to_string(),
        ));
    }
    Ok(correct as f64 / total as f64)
}

/// Per-class recall: diagonal over row sum.
pub fn classwise_recall(cm: &ConfusionMatrix) -> Result<[f64; N_CLASSES]> {
    let mut recalls = [0.0; N_CLASSES];
    for class in 0..N_CLASSES {
        let row = cm.row_sum(class);
        if row == 0 {
            return Err(Error::InvalidArgument(format!(
                "class {class} has no test samples; recall undefined"
            )));
        }
        recalls[class] = cm.counts[class][class] as f64 / row as f64;
    }
    Ok(recalls)
}

/// Mean probability the model assigns to `forget_class` over the samples.
pub fn mean_forget_prob(
    spec: &CircuitSpec,
    params: &[f64],
    features: &[Vec<f64>],
    forget_class: usize,
) -> Result<f64> {
    if features.is_empty() {
        return Err(Error::InvalidArgument(
            "mean forget probability needs at least one sample".to_string(),
        ));
    }
    let mut total = 0.0;
    for x in features {
        total += spec.predict_proba(params, x)?[forget_class];
    }
    Ok(total / features.len() as f64)
}

/// KL(p ‖ q) = Σ p_k ln(p_k / q_k) in nats; q is floored at 1e-12 and terms
/// with p_k = 0 contribute nothing.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&pk, _)| pk > 0.0)
        .map(|(&pk, &qk)| pk * (pk / qk.max(PROB_FLOOR)).ln())
        .sum()
}

/// Which distribution sits on the left of the KL divergence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KlDirection {
    /// KL(gold ‖ unlearned) — the default reading.
    GoldVsUnlearned,
    UnlearnedVsGold,
}

/// Distributional agreement between the gold retrained and unlearned models
/// on retained-class test samples.
#[derive(Clone, Debug, Serialize)]
pub struct KlReport {
    pub per_sample: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n − 1 divisor); 0 for a single sample.
    pub std: f64,
    pub median: f64,
    pub max: f64,
    pub retained_labels: Vec<usize>,
    pub direction: KlDirection,
    /// Samples dropped because their retained-class mass fell below 1e-9.
    pub skipped: usize,
    /// Mean (un-renormalized) forgotten-class probability of each model.
    pub mean_forget_prob_gold: f64,
    pub mean_forget_prob_unlearned: f64,
}

/// Restricts a distribution to the retained labels and renormalizes it;
/// `None` when the retained mass is below 1e-9.
pub fn renormalize_retained(
    probs: &[f64; N_CLASSES],
    retained_labels: &[usize],
) -> Option<Vec<f64>> {
    let total: f64 = retained_labels.iter().map(|&k| probs[k]).sum();
    if total < 1e-9 {
        return None;
    }
    Some(retained_labels.iter().map(|&k| probs[k] / total).collect())
}

/// Compares the gold and unlearned predictive distributions sample by
/// sample: both are restricted to the retained labels, renormalized, and
/// scored with KL in the requested direction. Samples whose retained mass
/// vanishes are skipped and counted.
#[allow(clippy::too_many_arguments)]
pub fn kl_to_gold(
    spec: &CircuitSpec,
    w_gold: &[f64],
    w_unlearned: &[f64],
    retained_x: &[Vec<f64>],
    retained_y: &[usize],
    forget_class: usize,
    direction: KlDirection,
) -> Result<KlReport> {
    if retained_x.is_empty() {
        return Err(Error::InvalidArgument(
            "KL evaluation needs at least one retained sample".to_string(),
        ));
    }
    if let Some(&bad) = retained_y.iter().find(|&&y| y == forget_class) {
        return Err(Error::InvalidArgument(format!(
            "retained test set contains a sample of forgotten class {bad}"
        )));
    }
    let retained_labels: Vec<usize> =
        (0..N_CLASSES).filter(|&k| k != forget_class).collect();

    let mut per_sample = Vec::with_capacity(retained_x.len());
    let mut skipped = 0;
    let mut gold_mass = 0.0;
    let mut unlearned_mass = 0.0;
    for x in retained_x {
        let p_gold = spec.predict_proba(w_gold, x)?;
        let p_unl = spec.predict_proba(w_unlearned, x)?;
        gold_mass += p_gold[forget_class];
        unlearned_mass += p_unl[forget_class];
        match (
            renormalize_retained(&p_gold, &retained_labels),
            renormalize_retained(&p_unl, &retained_labels),
        ) {
            (Some(g), Some(u)) => per_sample.push(match direction {
                KlDirection::GoldVsUnlearned => kl_divergence(&g, &u),
                KlDirection::UnlearnedVsGold => kl_divergence(&u, &g),
            }),
            _ => skipped += 1,
        }
    }
    if per_sample.is_empty() {
        return Err(Error::Numeric(format!(
            "all {skipped} samples lost their retained-class mass"
        )));
    }

    let n = per_sample.len() as f64;
    let mean = per_sample.iter().sum::<f64>() / n;
    let std = if per_sample.len() > 1 {
        (per_sample.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = per_sample.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
    };
    let max = *sorted.last().expect("non-empty");

    Ok(KlReport {
        per_sample,
        mean,
        std,
        median,
        max,
        retained_labels,
        direction,
        skipped,
        mean_forget_prob_gold: gold_mass / retained_x.len() as f64,
        mean_forget_prob_unlearned: unlearned_mass / retained_x.len() as f64,
    })
}

/// Histogram and norms of the per-parameter movement |w − w_orig|.
#[derive(Clone, Debug, Serialize)]
pub struct ParamDeltaSummary {
    /// Counts over 20 uniform bins spanning [0, max].
    pub histogram: [usize; 20],
    pub bin_width: f64,
    pub max: f64,
    pub mean: f64,
    pub l2: f64,
}

pub fn param_delta_summary(w: &[f64], w_orig: &[f64]) -> Result<ParamDeltaSummary> {
    if w.len() != w_orig.len() || w.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "need matching non-empty parameter vectors, got {}/{}",
            w.len(),
            w_orig.len()
        )));
    }
    let deltas: Vec<f64> = w.iter().zip(w_orig).map(|(a, b)| (a - b).abs()).collect();
    let max = deltas.iter().cloned().fold(0.0, f64::max);
    let mean = deltas.iter().sum::<f64>() / deltas.len() as f64;
    let l2 = deltas.iter().map(|d| d * d).sum::<f64>().sqrt();

    let mut histogram = [0usize; 20];
    let bin_width = max / 20.0;
    for &d in &deltas {
        let bin = if max == 0.0 {
            0
        } else {
            (((d / max) * 20.0) as usize).min(19)
        };
        histogram[bin] += 1;
    }
    Ok(ParamDeltaSummary {
        histogram,
        bin_width,
        max,
        mean,
        l2,
    })
}
