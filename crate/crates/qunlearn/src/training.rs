//! Classifier training: mini-batch cross-entropy minimized with
//! parameter-shift gradients, Adam, and a cosine learning-rate schedule.
//!
//! The shift rule is applied verbatim to the batch loss — two loss
//! evaluations per parameter at ±π/2 — which is exact for raw expectation
//! values and a controlled approximation once the softmax and log are
//! composed on top. An exact chain-rule gradient (per-logit shift rule plus
//! the analytic softmax/cross-entropy Jacobian) is available behind
//! [`TrainConfig::exact_gradient`] for diagnostics.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::Path;

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::circuit::{CircuitSpec, N_CLASSES, N_PARAMS};
use crate::data::{Dataset, SplitPartition};
use crate::error::{Error, Result};
use crate::rng::{seeded_rng, STREAM_BATCH, STREAM_PARAM_INIT};

/// Probabilities are floored at this value inside every log so the loss
/// stays finite even when a class is assigned zero mass.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub iterations: usize,
    pub batch_size: usize,
    pub peak_lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub init_sigma: f64,
    pub seed: u64,
    /// Use the exact chain-rule gradient instead of the verbatim shift rule.
    pub exact_gradient: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 300,
            batch_size: 10,
            peak_lr: 0.1,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            init_sigma: 0.01,
            seed: 42,
            exact_gradient: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::Config("iterations must be ≥ 1".to_string()));
        }
        if self.batch_size < 1 {
            return Err(Error::Config("batch size must be ≥ 1".to_string()));
        }
        if self.peak_lr <= 0.0 {
            return Err(Error::Config(format!(
                "peak learning rate must be > 0, got {}",
                self.peak_lr
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HistoryEntry {
    pub train_loss: f64,
    pub val_loss: f64,
    pub lr: f64,
}

#[derive(Clone, Debug)]
pub struct TrainedModel {
    /// Parameters from the iteration with the lowest validation loss
    /// (earliest iteration on ties).
    pub params: Vec<f64>,
    pub history: Vec<HistoryEntry>,
    pub best_iteration: usize,
    pub best_val_loss: f64,
    pub config: TrainConfig,
}

impl TrainedModel {
    pub fn write_history_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("iteration,train_loss,val_loss,lr\n");
        for (i, entry) in self.history.iter().enumerate() {
            out.push_str(&format!(
                "{i},{},{},{}\n",
                entry.train_loss, entry.val_loss, entry.lr
            ));
        }
        fs::write(path, out).map_err(Error::Io)
    }
}

/// Negative log-likelihood of one predicted distribution.
pub fn sample_nll(probs: &[f64; N_CLASSES], label: usize) -> f64 {
    -probs[label].max(PROB_FLOOR).ln()
}

/// Mean cross-entropy of the classifier over a batch.
pub fn cross_entropy_loss(
    spec: &CircuitSpec,
    params: &[f64],
    features: &[Vec<f64>],
    labels: &[usize],
) -> Result<f64> {
    if features.is_empty() || features.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "batch needs matching non-empty features/labels, got {}/{}",
            features.len(),
            labels.len()
        )));
    }
    let mut total = 0.0;
    for (x, &y) in features.iter().zip(labels) {
        let probs = spec.predict_proba(params, x)?;
        total += sample_nll(&probs, y);
    }
    Ok(total / features.len() as f64)
}

/// Central-difference gradient at shift ±π/2: gᵢ = (f(w + π/2·eᵢ) −
/// f(w − π/2·eᵢ)) / 2. The 2·len(w) evaluations run in parallel; the
/// result vector is assembled in index order so runs are deterministic
/// regardless of thread count.
pub fn parameter_shift_gradient<F>(f: F, params: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    (0..params.len())
        .into_par_iter()
        .map(|i| {
            let mut shifted = params.to_vec();
            shifted[i] = params[i] + FRAC_PI_2;
            let plus = f(&shifted)?;
            shifted[i] = params[i] - FRAC_PI_2;
            let minus = f(&shifted)?;
            let g = (plus - minus) / 2.0;
            if !g.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite value at shift index {i}: f(+) = {plus}, f(−) = {minus}"
                )));
            }
            Ok(g)
        })
        .collect()
}

/// Exact loss gradient: per-logit shift rule (exact for ⟨Z⟩ readouts)
/// chained through the softmax/cross-entropy Jacobian pₖ − δ_{k,y}.
pub fn exact_loss_gradient(
    spec: &CircuitSpec,
    params: &[f64],
    features: &[Vec<f64>],
    labels: &[usize],
) -> Result<Vec<f64>> {
    if features.is_empty() || features.len() != labels.len() {
        return Err(Error::InvalidArgument(
            "batch needs matching non-empty features/labels".to_string(),
        ));
    }
    let probs: Vec<[f64; N_CLASSES]> = features
        .iter()
        .map(|x| spec.predict_proba(params, x))
        .collect::<Result<_>>()?;

    (0..params.len())
        .into_par_iter()
        .map(|i| {
            let mut shifted = params.to_vec();
            let mut total = 0.0;
            for ((x, &y), p) in features.iter().zip(labels).zip(&probs) {
                shifted[i] = params[i] + FRAC_PI_2;
                let plus = spec.logits(&shifted, x)?;
                shifted[i] = params[i] - FRAC_PI_2;
                let minus = spec.logits(&shifted, x)?;
                for k in 0..N_CLASSES {
                    let dlogit = (plus[k] - minus[k]) / 2.0;
                    let coeff = p[k] - if k == y { 1.0 } else { 0.0 };
                    total += coeff * dlogit;
                }
            }
            let g = total / features.len() as f64;
            if !g.is_finite() {
                return Err(Error::Numeric(format!(
                    "non-finite value at shift index {i}"
                )));
            }
            Ok(g)
        })
        .collect()
}

/// Cosine decay from `peak_lr` at iteration 0 toward 0 at `total_iters`.
pub fn cosine_lr(iter: usize, total_iters: usize, peak_lr: f64) -> f64 {
    peak_lr * 0.5 * (1.0 + (PI * iter as f64 / total_iters as f64).cos())
}

/// Adam optimizer state with bias-corrected moments.
#[derive(Clone, Debug)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
}

impl AdamState {
    pub fn new(n: usize, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        AdamState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            beta1,
            beta2,
            epsilon,
        }
    }

    /// One descent step in place.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let bias1 = 1.0 - self.beta1.powi(self.t as i32);
        let bias2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bias1;
            let v_hat = self.v[i] / bias2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}

/// Draws uniform mini-batches without replacement, reshuffling the pool at
/// each epoch boundary.
struct BatchSampler {
    pool: Vec<usize>,
    cursor: usize,
    batch_size: usize,
    rng: rand_chacha::ChaCha8Rng,
}

impl BatchSampler {
    fn new(indices: &[usize], batch_size: usize, seed: u64) -> Self {
        BatchSampler {
            pool: indices.to_vec(),
            cursor: usize::MAX,
            batch_size,
            rng: seeded_rng(seed, STREAM_BATCH),
        }
    }

    fn next_batch(&mut self) -> Vec<usize> {
        use rand::seq::SliceRandom;
        if self.cursor >= self.pool.len() {
            self.pool.shuffle(&mut self.rng);
            self.cursor = 0;
        }
        let end = (self.cursor + self.batch_size).min(self.pool.len());
        let batch = self.pool[self.cursor..end].to_vec();
        self.cursor = end;
        batch
    }
}

pub fn initial_params(sigma: f64, seed: u64) -> Vec<f64> {
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    let mut rng = seeded_rng(seed, STREAM_PARAM_INIT);
    (0..N_PARAMS).map(|_| normal.sample(&mut rng)).collect()
}

fn gather(dataset: &Dataset, indices: &[usize]) -> (Vec<Vec<f64>>, Vec<usize>) {
    let features = indices.iter().map(|&i| dataset.features[i].clone()).collect();
    let labels = indices.iter().map(|&i| dataset.labels[i]).collect();
    (features, labels)
}

fn train_on_indices(
    spec: &CircuitSpec,
    dataset: &Dataset,
    train_indices: &[usize],
    val_indices: &[usize],
    config: &TrainConfig,
) -> Result<TrainedModel> {
    config.validate()?;
    if train_indices.is_empty() || val_indices.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "training needs non-empty train/val sets, got {}/{}",
            train_indices.len(),
            val_indices.len()
        )));
    }

    let (val_x, val_y) = gather(dataset, val_indices);
    let mut params = initial_params(config.init_sigma, config.seed);
    let mut adam = AdamState::new(N_PARAMS, config.beta1, config.beta2, config.epsilon);
    let mut sampler = BatchSampler::new(train_indices, config.batch_size, config.seed);

    let mut history = Vec::with_capacity(config.iterations);
    let mut best_iteration = 0;
    let mut best_val_loss = f64::INFINITY;
    let mut best_params = params.clone();

    for iter in 0..config.iterations {
        let lr = cosine_lr(iter, config.iterations, config.peak_lr);
        let batch = sampler.next_batch();
        let (batch_x, batch_y) = gather(dataset, &batch);

        let train_loss = cross_entropy_loss(spec, &params, &batch_x, &batch_y)?;
        let grad = if config.exact_gradient {
            exact_loss_gradient(spec, &params, &batch_x, &batch_y)?
        } else {
            parameter_shift_gradient(
                |w| cross_entropy_loss(spec, w, &batch_x, &batch_y),
                &params,
            )?
        };
        adam.step(&mut params, &grad, lr);

        let val_loss = cross_entropy_loss(spec, &params, &val_x, &val_y)?;
        history.push(HistoryEntry {
            train_loss,
            val_loss,
            lr,
        });
        if val_loss < best_val_loss {
            best_val_loss = val_loss;
            best_iteration = iter;
            best_params = params.clone();
        }
    }

    Ok(TrainedModel {
        params: best_params,
        history,
        best_iteration,
        best_val_loss,
        config: config.clone(),
    })
}

/// Trains on the partition's full train set, selecting the parameters with
/// the lowest validation loss over all iterations.
pub fn train(
    spec: &CircuitSpec,
    dataset: &Dataset,
    partition: &SplitPartition,
    config: &TrainConfig,
) -> Result<TrainedModel> {
    train_on_indices(spec, dataset, &partition.train, &partition.val, config)
}

/// Index sets with every row of `forget_class` removed.
pub fn retained_indices(
    indices: &[usize],
    labels: &[usize],
    forget_class: usize,
) -> Vec<usize> {
    indices
        .iter()
        .copied()
        .filter(|&i| labels[i] != forget_class)
        .collect()
}

/// Retrains from a fresh initialization with the forgotten class stripped
/// from both the train and validation sets — the reference a successful
/// unlearning run is compared against.
pub fn train_gold(
    spec: &CircuitSpec,
    dataset: &Dataset,
    partition: &SplitPartition,
    config: &TrainConfig,
) -> Result<TrainedModel> {
    let Some(forget_class) = partition.forget_class else {
        return Err(Error::InvalidArgument(
            "gold retraining needs a forget class on the partition".to_string(),
        ));
    };
    let train = retained_indices(&partition.train, &dataset.labels, forget_class);
    let val = retained_indices(&partition.val, &dataset.labels, forget_class);
    train_on_indices(spec, dataset, &train, &val, config)
}
