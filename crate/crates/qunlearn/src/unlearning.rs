//! Distribution-guided class unlearning.
//!
//! Starting from a trained model, the forgotten class's training samples are
//! pushed toward a target distribution over the remaining classes — built
//! from the model's own confusion mass (similarity-guided) or uniform —
//! while anchor samples from the retained classes are held near their cached
//! original predictions and the parameters are tethered to their original
//! values. The resulting objective is maximized by Adam gradient ascent with
//! parameter-shift gradients.

use rand::seq::index::sample as index_sample;
use rand::seq::SliceRandom;

use crate::circuit::{CircuitSpec, N_CLASSES};
use crate::data::{Dataset, SplitPartition};
use crate::error::{Error, Result};
use crate::rng::{seeded_rng, STREAM_CALIBRATION, STREAM_UNLEARN_BATCH};
use crate::training::{parameter_shift_gradient, AdamState, PROB_FLOOR};

/// How the forget-target distribution is constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetSource {
    /// Mass proportional to the original model's mean confusion toward each
    /// retained class, sharpened by β.
    SimilarityGuided,
    /// Equal mass on every retained class.
    Uniform,
}

/// Target distribution the forgotten class's samples are steered toward.
/// Zero on the forgotten class, a distribution over the rest.
#[derive(Clone, Debug)]
pub struct ForgetTarget {
    pub q: [f64; N_CLASSES],
    pub forget_class: usize,
    pub beta: f64,
    pub source: TargetSource,
}

/// Original-model predictions for every anchor sample, cached once and never
/// updated while unlearning runs.
#[derive(Clone, Debug, PartialEq)]
pub struct AnchorRefs {
    pub probs: Vec<[f64; N_CLASSES]>,
}

#[derive(Clone, Debug)]
pub struct UnlearnConfig {
    /// Weight of the anchor retention term.
    pub alpha: f64,
    /// Weight of the parameter-anchoring penalty ‖w − w_orig‖².
    pub lambda: f64,
    /// Sharpness of the similarity-guided target.
    pub beta: f64,
    pub steps: usize,
    pub lr: f64,
    /// Per-step sample caps; `None` uses the full sets.
    pub batch_forget: Option<usize>,
    pub batch_anchor: Option<usize>,
    /// Fraction of the forget set used to calibrate the target.
    pub calibration_fraction: f64,
    pub target_source: TargetSource,
    pub seed: u64,
}

impl Default for UnlearnConfig {
    fn default() -> Self {
        UnlearnConfig {
            alpha: 1.0,
            lambda: 0.01,
            beta: 1.0,
            steps: 100,
            lr: 0.05,
            batch_forget: None,
            batch_anchor: None,
            calibration_fraction: 1.0,
            target_source: TargetSource::SimilarityGuided,
            seed: 42,
        }
    }
}

impl UnlearnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alpha < 0.0 || self.lambda < 0.0 {
            return Err(Error::Config(format!(
                "alpha and lambda must be ≥ 0, got {} and {}",
                self.alpha, self.lambda
            )));
        }
        if self.beta <= 0.0 {
            return Err(Error::Config(format!(
                "beta must be > 0, got {}",
                self.beta
            )));
        }
        if self.lr <= 0.0 {
            return Err(Error::Config(format!(
                "learning rate must be > 0, got {}",
                self.lr
            )));
        }
        if !(0.0 < self.calibration_fraction && self.calibration_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "calibration fraction must be in (0, 1], got {}",
                self.calibration_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct UnlearnResult {
    pub params: Vec<f64>,
    pub w_orig: Vec<f64>,
    pub target: ForgetTarget,
    /// Full-set objective value after each ascent step.
    pub objective_history: Vec<f64>,
    /// |wᵢ − w_orig,ᵢ| per parameter.
    pub param_delta: Vec<f64>,
}

/// Normalizes per-class confusion means into the target distribution:
/// q_k = m_k^β / Σ_{j≠f} m_j^β and q_f = 0.
pub fn normalize_target(
    means: &[f64; N_CLASSES],
    forget_class: usize,
    beta: f64,
) -> Result<[f64; N_CLASSES]> {
    let mut q = [0.0; N_CLASSES];
    let mut total = 0.0;
    for k in (0..N_CLASSES).filter(|&k| k != forget_class) {
        q[k] = means[k].powf(beta);
        total += q[k];
    }
    if total <= PROB_FLOOR {
        return Err(Error::Numeric(format!(
            "retained-class confusion mass vanished (Σ m^β = {total})"
        )));
    }
    for k in (0..N_CLASSES).filter(|&k| k != forget_class) {
        q[k] /= total;
    }
    Ok(q)
}

/// Builds the similarity-guided target from the original model's mean
/// predictions over the calibration samples (all carrying the forgotten
/// label).
pub fn compute_forget_target(
    spec: &CircuitSpec,
    w_orig: &[f64],
    calibration_x: &[Vec<f64>],
    calibration_y: &[usize],
    forget_class: usize,
    beta: f64,
) -> Result<ForgetTarget> {
    if calibration_x.is_empty() {
        return Err(Error::InvalidArgument(
            "calibration set is empty".to_string(),
        ));
    }
    if let Some(&bad) = calibration_y.iter().find(|&&y| y != forget_class) {
        return Err(Error::InvalidArgument(format!(
            "calibration sample labeled {bad} is not in forget class {forget_class}"
        )));
    }
    let mut means = [0.0; N_CLASSES];
    for x in calibration_x {
        let probs = spec.predict_proba(w_orig, x)?;
        for k in 0..N_CLASSES {
            means[k] += probs[k];
        }
    }
    for m in &mut means {
        *m /= calibration_x.len() as f64;
    }
    Ok(ForgetTarget {
        q: normalize_target(&means, forget_class, beta)?,
        forget_class,
        beta,
        source: TargetSource::SimilarityGuided,
    })
}

/// Equal weight on every class except `forget_class`, for any class count —
/// the general construction behind the uniform baseline.
pub fn uniform_target_weights(forget_class: usize, n_classes: usize) -> Result<Vec<f64>> {
    if n_classes < 2 {
        return Err(Error::InvalidArgument(format!(
            "uniform target needs at least 2 classes, got {n_classes}"
        )));
    }
    if forget_class >= n_classes {
        return Err(Error::InvalidArgument(format!(
            "forget class {forget_class} out of range for {n_classes} classes"
        )));
    }
    let weight = 1.0 / (n_classes - 1) as f64;
    Ok((0..n_classes)
        .map(|k| if k == forget_class { 0.0 } else { weight })
        .collect())
}

/// The uniform baseline target for this classifier's three classes.
pub fn uniform_forget_target(forget_class: usize) -> Result<ForgetTarget> {
    let weights = uniform_target_weights(forget_class, N_CLASSES)?;
    let mut q = [0.0; N_CLASSES];
    q.copy_from_slice(&weights);
    Ok(ForgetTarget {
        q,
        forget_class,
        beta: 1.0,
        source: TargetSource::Uniform,
    })
}

/// Caches the original model's prediction for every anchor sample.
pub fn cache_anchor_refs(
    spec: &CircuitSpec,
    w_orig: &[f64],
    anchor_x: &[Vec<f64>],
) -> Result<AnchorRefs> {
    if anchor_x.is_empty() {
        return Err(Error::InvalidArgument("anchor set is empty".to_string()));
    }
    let probs = anchor_x
        .iter()
        .map(|x| spec.predict_proba(w_orig, x))
        .collect::<Result<_>>()?;
    Ok(AnchorRefs { probs })
}

fn floored_ln(p: f64) -> f64 {
    p.max(PROB_FLOOR).ln()
}

/// The unlearning objective
///
///   J(w) = mean_{x∈F} Σ_k q_k · log p_w(k|x)
///        + α · mean_{x∈A} Σ_k p_ref(k|x) · log p_w(k|x)
///        − λ‖w − w_orig‖₂²
///
/// maximized during unlearning. Terms with q_k = 0 are skipped outright (the
/// forgotten class contributes nothing), and logs are floored at 1e-12.
#[allow(clippy::too_many_arguments)]
pub fn objective(
    spec: &CircuitSpec,
    w: &[f64],
    forget_x: &[Vec<f64>],
    target: &ForgetTarget,
    anchor_x: &[Vec<f64>],
    refs: &AnchorRefs,
    alpha: f64,
    lambda: f64,
    w_orig: &[f64],
) -> Result<f64> {
    let forget_term = forget_cross_term(spec, w, forget_x, target)?;

    let mut anchor_term = 0.0;
    if alpha != 0.0 {
        for (x, p_ref) in anchor_x.iter().zip(&refs.probs) {
            let p = spec.predict_proba(w, x)?;
            for k in 0..N_CLASSES {
                anchor_term += p_ref[k] * floored_ln(p[k]);
            }
        }
        anchor_term /= anchor_x.len() as f64;
    }

    Ok(forget_term + alpha * anchor_term - lambda * sq_distance(w, w_orig))
}

/// The forget-set cross term mean_{x∈F} Σ_k q_k log p_w(k|x) shared by both
/// objective forms.
pub fn forget_cross_term(
    spec: &CircuitSpec,
    w: &[f64],
    forget_x: &[Vec<f64>],
    target: &ForgetTarget,
) -> Result<f64> {
    if forget_x.is_empty() {
        return Err(Error::InvalidArgument("forget set is empty".to_string()));
    }
    let mut total = 0.0;
    for x in forget_x {
        let p = spec.predict_proba(w, x)?;
        for k in 0..N_CLASSES {
            if target.q[k] != 0.0 {
                total += target.q[k] * floored_ln(p[k]);
            }
        }
    }
    Ok(total / forget_x.len() as f64)
}

fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Equivalent constrained-optimization form of the objective,
///
///   J_L(w) = L_F(w) − α · mean_{x∈A} KL(p_ref(·|x) ‖ p_w(·|x)) − λ‖w − w_orig‖₂²,
///
/// which differs from [`objective`] only by the w-independent constant
/// α · mean Σ p_ref log p_ref. Used to verify that equivalence numerically.
#[allow(clippy::too_many_arguments)]
pub fn objective_lagrangian_form(
    spec: &CircuitSpec,
    w: &[f64],
    forget_x: &[Vec<f64>],
    target: &ForgetTarget,
    anchor_x: &[Vec<f64>],
    refs: &AnchorRefs,
    alpha: f64,
    lambda: f64,
    w_orig: &[f64],
) -> Result<f64> {
    let forget_term = forget_cross_term(spec, w, forget_x, target)?;

    let mut kl_term = 0.0;
    if alpha != 0.0 {
        for (x, p_ref) in anchor_x.iter().zip(&refs.probs) {
            let p = spec.predict_proba(w, x)?;
            for k in 0..N_CLASSES {
                if p_ref[k] > 0.0 {
                    kl_term += p_ref[k] * (floored_ln(p_ref[k]) - floored_ln(p[k]));
                }
            }
        }
        kl_term /= anchor_x.len() as f64;
    }

    Ok(forget_term - alpha * kl_term - lambda * sq_distance(w, w_orig))
}

/// Runs `config.steps` Adam ascent steps on the objective from `w_orig`,
/// using parameter-shift gradients. The recorded history holds the full-set
/// objective after each step even when mini-batching is enabled.
pub fn unlearn(
    spec: &CircuitSpec,
    dataset: &Dataset,
    partition: &SplitPartition,
    w_orig: &[f64],
    config: &UnlearnConfig,
) -> Result<UnlearnResult> {
    config.validate()?;
    let Some(forget_class) = partition.forget_class else {
        return Err(Error::InvalidArgument(
            "partition carries no forget class".to_string(),
        ));
    };
    if partition.forget.is_empty() || partition.anchor.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "unlearning needs non-empty forget/anchor sets, got {}/{}",
            partition.forget.len(),
            partition.anchor.len()
        )));
    }

    let forget_x: Vec<Vec<f64>> = partition
        .forget
        .iter()
        .map(|&i| dataset.features[i].clone())
        .collect();
    let forget_y: Vec<usize> = partition.forget.iter().map(|&i| dataset.labels[i]).collect();
    let anchor_x: Vec<Vec<f64>> = partition
        .anchor
        .iter()
        .map(|&i| dataset.features[i].clone())
        .collect();

    let target = match config.target_source {
        TargetSource::Uniform => uniform_forget_target(forget_class)?,
        TargetSource::SimilarityGuided => {
            let (cal_x, cal_y) = calibration_subset(&forget_x, &forget_y, config);
            compute_forget_target(spec, w_orig, &cal_x, &cal_y, forget_class, config.beta)?
        }
    };
    let refs = cache_anchor_refs(spec, w_orig, &anchor_x)?;

    let mut params = w_orig.to_vec();
    let mut adam = AdamState::new(params.len(), 0.9, 0.999, 1e-8);
    let mut batch_rng = seeded_rng(config.seed, STREAM_UNLEARN_BATCH);
    let mut objective_history = Vec::with_capacity(config.steps);

    for _ in 0..config.steps {
        let (step_fx, step_ax, step_refs) = match (config.batch_forget, config.batch_anchor) {
            (None, None) => (forget_x.clone(), anchor_x.clone(), refs.clone()),
            _ => {
                let fx = subsample(&forget_x, config.batch_forget, &mut batch_rng);
                let picked = subsample_indices(anchor_x.len(), config.batch_anchor, &mut batch_rng);
                let ax = picked.iter().map(|&i| anchor_x[i].clone()).collect();
                let r = AnchorRefs {
                    probs: picked.iter().map(|&i| refs.probs[i]).collect(),
                };
                (fx, ax, r)
            }
        };

        let grad = parameter_shift_gradient(
            |w| {
                objective(
                    spec, w, &step_fx, &target, &step_ax, &step_refs, config.alpha,
                    config.lambda, w_orig,
                )
            },
            &params,
        )?;
        // Adam minimizes; ascend by stepping against the negated gradient.
        let descent: Vec<f64> = grad.iter().map(|g| -g).collect();
        adam.step(&mut params, &descent, config.lr);

        objective_history.push(objective(
            spec,
            &params,
            &forget_x,
            &target,
            &anchor_x,
            &refs,
            config.alpha,
            config.lambda,
            w_orig,
        )?);
    }

    let param_delta = params
        .iter()
        .zip(w_orig)
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(UnlearnResult {
        params,
        w_orig: w_orig.to_vec(),
        target,
        objective_history,
        param_delta,
    })
}

fn calibration_subset(
    forget_x: &[Vec<f64>],
    forget_y: &[usize],
    config: &UnlearnConfig,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    if config.calibration_fraction >= 1.0 {
        return (forget_x.to_vec(), forget_y.to_vec());
    }
    let keep = ((forget_x.len() as f64) * config.calibration_fraction).round() as usize;
    let keep = keep.max(1);
    let mut positions: Vec<usize> = (0..forget_x.len()).collect();
    positions.shuffle(&mut seeded_rng(config.seed, STREAM_CALIBRATION));
    positions.truncate(keep);
    positions.sort_unstable();
    (
        positions.iter().map(|&i| forget_x[i].clone()).collect(),
        positions.iter().map(|&i| forget_y[i]).collect(),
    )
}

fn subsample(
    rows: &[Vec<f64>],
    cap: Option<usize>,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<Vec<f64>> {
    subsample_indices(rows.len(), cap, rng)
        .into_iter()
        .map(|i| rows[i].clone())
        .collect()
}

fn subsample_indices(
    len: usize,
    cap: Option<usize>,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<usize> {
    match cap {
        Some(b) if b < len => {
            let mut picked = index_sample(rng, len, b).into_vec();
            picked.sort_unstable();
            picked
        }
        _ => (0..len).collect(),
    }
}
