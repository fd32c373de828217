//! Run configuration: a flat dotted-key text format (`key = value`, `#`
//! comments) merged with command-line overrides, where flags win. Every
//! resolved configuration serializes back to canonical key/value pairs so
//! manifests can reproduce a run exactly.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::data::PerClassSplit;
use crate::error::{Error, Result};
use crate::evaluation::KlDirection;
use crate::training::TrainConfig;
use crate::unlearning::{TargetSource, UnlearnConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetKind {
    Iris,
    Covertype,
}

impl DatasetKind {
    pub fn name(&self) -> &'static str {
        match self {
            DatasetKind::Iris => "iris",
            DatasetKind::Covertype => "covertype",
        }
    }

    fn default_split(&self) -> PerClassSplit {
        match self {
            DatasetKind::Iris => PerClassSplit {
                train: 35,
                val: 10,
                test: 5,
            },
            DatasetKind::Covertype => PerClassSplit {
                train: 60,
                val: 10,
                test: 30,
            },
        }
    }

    fn default_data_path(&self) -> PathBuf {
        match self {
            DatasetKind::Iris => PathBuf::from("data/iris.csv"),
            DatasetKind::Covertype => PathBuf::from("data/covertype_sample.csv"),
        }
    }
}

/// Everything a pipeline run needs, resolvable from defaults, a config
/// file, and flag overrides (in that order of precedence).
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub dataset: DatasetKind,
    /// Data file location; `None` uses the dataset's conventional path.
    pub data_path: Option<PathBuf>,
    pub has_header: bool,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Per-class split sizes; `None` uses the dataset's defaults.
    pub split: Option<PerClassSplit>,
    pub per_class_cap: usize,
    pub forget_class: Option<usize>,
    pub anchor_fraction: f64,
    pub train: TrainConfig,
    pub unlearn: UnlearnConfig,
    pub kl_direction: KlDirection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: DatasetKind::Iris,
            data_path: None,
            has_header: false,
            seed: 42,
            out_dir: PathBuf::from("runs"),
            split: None,
            per_class_cap: 100,
            forget_class: None,
            anchor_fraction: 1.0,
            train: TrainConfig::default(),
            unlearn: UnlearnConfig::default(),
            kl_direction: KlDirection::GoldVsUnlearned,
        }
    }
}

impl RunConfig {
    pub fn effective_split(&self) -> PerClassSplit {
        self.split.unwrap_or_else(|| self.dataset.default_split())
    }

    pub fn effective_data_path(&self) -> PathBuf {
        self.data_path
            .clone()
            .unwrap_or_else(|| self.dataset.default_data_path())
    }

    /// The seed governs every stochastic stage; training and unlearning
    /// configs carry copies so they can be used standalone.
    pub fn propagate_seed(&mut self) {
        self.train.seed = self.seed;
        self.unlearn.seed = self.seed;
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(f) = self.forget_class {
            if f > 2 {
                return Err(Error::Config(format!(
                    "forget_class must be in 0..3, got {f}"
                )));
            }
        }
        if !(0.0 < self.anchor_fraction && self.anchor_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "anchor_fraction must be in (0, 1], got {}",
                self.anchor_fraction
            )));
        }
        self.train.validate()?;
        self.unlearn.validate()?;
        Ok(())
    }

    /// Applies one dotted-key setting. Unknown keys and malformed values are
    /// config errors naming the key.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| {
                Error::Config(format!("key '{key}': cannot parse value '{value}'"))
            })
        }

        match key {
            "dataset" => {
                self.dataset = match value {
                    "iris" => DatasetKind::Iris,
                    "covertype" => DatasetKind::Covertype,
                    other => {
                        return Err(Error::Config(format!(
                            "key 'dataset': expected iris or covertype, got '{other}'"
                        )))
                    }
                }
            }
            "data.path" => self.data_path = Some(PathBuf::from(value)),
            "data.has_header" => self.has_header = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "split.train" => self.split_mut().train = parse(key, value)?,
            "split.val" => self.split_mut().val = parse(key, value)?,
            "split.test" => self.split_mut().test = parse(key, value)?,
            "covertype.per_class_cap" => self.per_class_cap = parse(key, value)?,
            "forget_class" => {
                self.forget_class = match value {
                    "none" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "anchor_fraction" => self.anchor_fraction = parse(key, value)?,
            "train.iterations" => self.train.iterations = parse(key, value)?,
            "train.batch_size" => self.train.batch_size = parse(key, value)?,
            "train.peak_lr" => self.train.peak_lr = parse(key, value)?,
            "train.beta1" => self.train.beta1 = parse(key, value)?,
            "train.beta2" => self.train.beta2 = parse(key, value)?,
            "train.epsilon" => self.train.epsilon = parse(key, value)?,
            "train.init_sigma" => self.train.init_sigma = parse(key, value)?,
            "train.exact_gradient" => self.train.exact_gradient = parse(key, value)?,
            "unlearn.alpha" => self.unlearn.alpha = parse(key, value)?,
            "unlearn.lambda" => self.unlearn.lambda = parse(key, value)?,
            "unlearn.beta" => self.unlearn.beta = parse(key, value)?,
            "unlearn.steps" => self.unlearn.steps = parse(key, value)?,
            "unlearn.lr" => self.unlearn.lr = parse(key, value)?,
            "unlearn.batch_forget" => {
                self.unlearn.batch_forget = match value {
                    "none" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "unlearn.batch_anchor" => {
                self.unlearn.batch_anchor = match value {
                    "none" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "unlearn.calibration_fraction" => {
                self.unlearn.calibration_fraction = parse(key, value)?
            }
            "unlearn.target" => {
                self.unlearn.target_source = match value {
                    "similarity" => TargetSource::SimilarityGuided,
                    "uniform" => TargetSource::Uniform,
                    other => {
                        return Err(Error::Config(format!(
                            "key 'unlearn.target': expected similarity or uniform, got '{other}'"
                        )))
                    }
                }
            }
            "eval.kl_direction" => {
                self.kl_direction = match value {
                    "gold-vs-unlearned" => KlDirection::GoldVsUnlearned,
                    "unlearned-vs-gold" => KlDirection::UnlearnedVsGold,
                    other => {
                        return Err(Error::Config(format!(
                            "key 'eval.kl_direction': expected gold-vs-unlearned or \
                             unlearned-vs-gold, got '{other}'"
                        )))
                    }
                }
            }
            other => {
                return Err(Error::Config(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }

    fn split_mut(&mut self) -> &mut PerClassSplit {
        if self.split.is_none() {
            self.split = Some(self.dataset.default_split());
        }
        self.split.as_mut().expect("just initialized")
    }

    /// Canonical key/value form of the fully resolved configuration; the
    /// exact pairs a manifest records and [`RunConfig::apply`] accepts back.
    pub fn to_kv_pairs(&self) -> BTreeMap<String, String> {
        let mut kv = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            kv.insert(k.to_string(), v);
        };
        put("dataset", self.dataset.name().to_string());
        put("data.path", self.effective_data_path().display().to_string());
        put("data.has_header", self.has_header.to_string());
        put("seed", self.seed.to_string());
        put("out_dir", self.out_dir.display().to_string());
        let split = self.effective_split();
        put("split.train", split.train.to_string());
        put("split.val", split.val.to_string());
        put("split.test", split.test.to_string());
        put("covertype.per_class_cap", self.per_class_cap.to_string());
        put(
            "forget_class",
            self.forget_class
                .map_or("none".to_string(), |f| f.to_string()),
        );
        put("anchor_fraction", self.anchor_fraction.to_string());
        put("train.iterations", self.train.iterations.to_string());
        put("train.batch_size", self.train.batch_size.to_string());
        put("train.peak_lr", self.train.peak_lr.to_string());
        put("train.beta1", self.train.beta1.to_string());
        put("train.beta2", self.train.beta2.to_string());
        put("train.epsilon", self.train.epsilon.to_string());
        put("train.init_sigma", self.train.init_sigma.to_string());
        put(
            "train.exact_gradient",
            self.train.exact_gradient.to_string(),
        );
        put("unlearn.alpha", self.unlearn.alpha.to_string());
        put("unlearn.lambda", self.unlearn.lambda.to_string());
        put("unlearn.beta", self.unlearn.beta.to_string());
        put("unlearn.steps", self.unlearn.steps.to_string());
        put("unlearn.lr", self.unlearn.lr.to_string());
        put(
            "unlearn.batch_forget",
            self.unlearn
                .batch_forget
                .map_or("none".to_string(), |b| b.to_string()),
        );
        put(
            "unlearn.batch_anchor",
            self.unlearn
                .batch_anchor
                .map_or("none".to_string(), |b| b.to_string()),
        );
        put(
            "unlearn.calibration_fraction",
            self.unlearn.calibration_fraction.to_string(),
        );
        put(
            "unlearn.target",
            match self.unlearn.target_source {
                TargetSource::SimilarityGuided => "similarity".to_string(),
                TargetSource::Uniform => "uniform".to_string(),
            },
        );
        put(
            "eval.kl_direction",
            match self.kl_direction {
                KlDirection::GoldVsUnlearned => "gold-vs-unlearned".to_string(),
                KlDirection::UnlearnedVsGold => "unlearned-vs-gold".to_string(),
            },
        );
        kv
    }

    /// SHA-256 over the canonical `key = value` rendering.
    pub fn config_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for (k, v) in self.to_kv_pairs() {
            hasher.update(k.as_bytes());
            hasher.update(b" = ");
            hasher.update(v.as_bytes());
            hasher.update(b"\n");
        }
        format!("{:x}", hasher.finalize())
    }
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// skipped. Returns the pairs in file order.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "config line {}: expected 'key = value', got '{raw}'",
                i + 1
            )));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Loads a config file on top of `config`.
pub fn apply_config_file(config: &mut RunConfig, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("reading config {}: {e}", path.display()),
        ))
    })?;
    for (key, value) in parse_config_text(&text)? {
        config.apply(&key, &value)?;
    }
    Ok(())
}
