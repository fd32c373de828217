//! Parameter checkpoints: JSON files holding a trained weight vector plus
//! enough metadata to reject files from an incompatible circuit layout.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::{N_PARAMS, PARAM_ORDER_TAG};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckpointMetadata {
    pub dataset: String,
    pub seed: u64,
    /// Which pipeline stage produced the file: "trained", "gold", or
    /// "unlearned".
    pub stage: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Checkpoint {
    pub n_params: usize,
    pub param_order_tag: String,
    pub values: Vec<f64>,
    pub metadata: CheckpointMetadata,
}

impl Checkpoint {
    pub fn new(values: Vec<f64>, metadata: CheckpointMetadata) -> Self {
        Checkpoint {
            n_params: values.len(),
            param_order_tag: PARAM_ORDER_TAG.to_string(),
            values,
            metadata,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_params != self.values.len() {
            return Err(Error::Format(format!(
                "checkpoint declares {} parameters but holds {}",
                self.n_params,
                self.values.len()
            )));
        }
        if self.n_params != N_PARAMS {
            return Err(Error::Format(format!(
                "checkpoint holds {} parameters, this circuit needs {N_PARAMS}",
                self.n_params
            )));
        }
        if self.param_order_tag != PARAM_ORDER_TAG {
            return Err(Error::Format(format!(
                "checkpoint parameter order '{}' does not match '{PARAM_ORDER_TAG}'",
                self.param_order_tag
            )));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Format(format!(
                "checkpoint value {i} is not finite"
            )));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("writing {}: {e}", path.display()),
            ))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("reading {}: {e}", path.display()),
            ))
        })?;
        let checkpoint: Checkpoint = serde_json::from_str(&text)?;
        checkpoint.validate()?;
        Ok(checkpoint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_metadata() -> CheckpointMetadata {
        CheckpointMetadata {
            dataset: "iris".to_string(),
            seed: 42,
            stage: "trained".to_string(),
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut values: Vec<f64> = (0..N_PARAMS).map(|_| rng.gen_range(-4.0..4.0)).collect();
        // Values chosen to stress decimal printing: non-terminating binary
        // fractions, subnormal-adjacent magnitudes, and signed zero.
        values[0] = 1.0 / 3.0;
        values[1] = 1e-300;
        values[2] = -0.0;
        values[3] = f64::MIN_POSITIVE;
        values[4] = 0.1 + 0.2;

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("weights.json");
        let saved = Checkpoint::new(values, sample_metadata());
        saved.save(&path).unwrap();
        let loaded = Checkpoint::load(&path).unwrap();

        assert_eq!(loaded.n_params, N_PARAMS);
        assert_eq!(loaded.param_order_tag, PARAM_ORDER_TAG);
        assert_eq!(loaded.metadata, saved.metadata);
        for (a, b) in saved.values.iter().zip(&loaded.values) {
            assert_eq!(a.to_bits(), b.to_bits(), "{a} vs {b}");
        }
    }

    #[test]
    fn load_rejects_length_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        let mut checkpoint = Checkpoint::new(vec![0.0; N_PARAMS], sample_metadata());
        checkpoint.n_params = 5;
        let json = serde_json::to_string(&checkpoint).unwrap();
        std::fs::write(&path, json).unwrap();
        assert!(matches!(Checkpoint::load(&path), Err(Error::Format(_))));
    }

    #[test]
    fn load_rejects_unknown_param_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        let mut checkpoint = Checkpoint::new(vec![0.0; N_PARAMS], sample_metadata());
        checkpoint.param_order_tag = "some-other-layout".to_string();
        let json = serde_json::to_string(&checkpoint).unwrap();
        std::fs::write(&path, json).unwrap();
        assert!(matches!(Checkpoint::load(&path), Err(Error::Format(_))));
    }

    #[test]
    fn load_reports_missing_file_as_io_error() {
        let err = Checkpoint::load(Path::new("/nonexistent/weights.json")).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn save_rejects_non_finite_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        let mut values = vec![0.0; N_PARAMS];
        values[10] = f64::NAN;
        let checkpoint = Checkpoint::new(values, sample_metadata());
        assert!(matches!(checkpoint.save(&path), Err(Error::Format(_))));
    }
}
