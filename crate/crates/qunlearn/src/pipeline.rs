//! Experiment pipeline shared by the CLI and the runnable examples: dataset
//! preparation, the train / gold-retrain / unlearn / evaluate commands, the
//! ablation sweeps, and the manifest written next to every artifact so a run
//! can be reproduced from its outputs alone.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::checkpoint::{Checkpoint, CheckpointMetadata};
use crate::circuit::{CircuitSpec, N_CLASSES, N_FEATURES};
use crate::config::{DatasetKind, RunConfig};
use crate::data::{
    fit_minmax, fit_pca, load_covertype, load_iris, partition_forget_anchor, split, transform_pca,
    Dataset, SplitPartition,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    accuracy, classwise_recall, confusion_matrix, kl_to_gold, mean_forget_prob,
    param_delta_summary, retained_accuracy, ConfusionMatrix, KlDirection, KlReport,
    ParamDeltaSummary,
};
use crate::training::{train, train_gold, TrainedModel};
use crate::unlearning::{unlearn, TargetSource, UnlearnResult};

/// Raw Covertype labels kept by the loader, in class-index order: label 3
/// becomes class 0, label 5 class 1, label 7 class 2.
pub const COVERTYPE_CLASSES: [u32; N_CLASSES] = [3, 5, 7];

/// Forget class used by ablation sweeps when the config leaves it unset.
/// The class-wise axis sweeps classes 0 and 1, so class 1 keeps single-axis
/// sweeps inside the same range.
pub const DEFAULT_ABLATION_FORGET_CLASS: usize = 1;

pub const STAGE_TRAINED: &str = "trained";
pub const STAGE_GOLD: &str = "gold";
pub const STAGE_UNLEARNED: &str = "unlearned";

/// Artifact file names, shared by the commands, the CLI, and the tests.
pub mod files {
    pub const CHECKPOINT_TRAINED: &str = "checkpoint_trained.json";
    pub const CHECKPOINT_GOLD: &str = "checkpoint_gold.json";
    pub const CHECKPOINT_UNLEARNED: &str = "checkpoint_unlearned.json";
    pub const HISTORY_TRAINED: &str = "history_trained.csv";
    pub const HISTORY_GOLD: &str = "history_gold.csv";
    pub const OBJECTIVE_HISTORY: &str = "objective_history.csv";
    pub const MANIFEST_TRAIN: &str = "manifest_train.json";
    pub const MANIFEST_GOLD: &str = "manifest_gold.json";
    pub const MANIFEST_UNLEARN: &str = "manifest_unlearn.json";
    pub const MANIFEST_EVAL: &str = "manifest_eval.json";
    pub const REPORT_JSON: &str = "report.json";
    pub const REPORT_TEXT: &str = "report.txt";
    pub const CONFUSION_ORIGINAL: &str = "confusion_original.csv";
    pub const CONFUSION_UNLEARNED: &str = "confusion_unlearned.csv";
    pub const CONFUSION_GOLD: &str = "confusion_gold.csv";
}

fn io_error(path: &Path, action: &str, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{action} {}: {e}", path.display()),
    ))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_error(path, "writing", e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    write_text(path, &json)
}

/// Hex-encoded SHA-256 of a file's bytes.
pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| io_error(path, "reading", e))?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Clones the feature rows and labels at `indices`.
pub fn select_rows(dataset: &Dataset, indices: &[usize]) -> (Vec<Vec<f64>>, Vec<usize>) {
    (
        indices
            .iter()
            .map(|&i| dataset.features[i].clone())
            .collect(),
        indices.iter().map(|&i| dataset.labels[i]).collect(),
    )
}

/// A dataset whose features are model-ready (PCA-projected for Covertype,
/// then min-max scaled into [0, π]) plus the seeded index partition. All
/// transforms are fitted on the training rows only and applied everywhere.
#[derive(Clone, Debug)]
pub struct PreparedData {
    pub dataset: Dataset,
    pub partition: SplitPartition,
}

/// Loads, splits, and preprocesses the configured dataset. When the config
/// names a forget class, the training rows are further partitioned into the
/// forget and anchor sets.
pub fn prepare_data(config: &RunConfig) -> Result<PreparedData> {
    config.validate()?;
    let path = config.effective_data_path();
    let raw = match config.dataset {
        DatasetKind::Iris => load_iris(&path, config.has_header)?,
        DatasetKind::Covertype => load_covertype(
            &path,
            config.has_header,
            &COVERTYPE_CLASSES,
            config.per_class_cap,
            config.seed,
        )?,
    };
    let partition = split(&raw, config.seed, config.effective_split())?;

    let projected = match config.dataset {
        DatasetKind::Iris => raw.features.clone(),
        DatasetKind::Covertype => {
            let train_rows: Vec<Vec<f64>> = partition
                .train
                .iter()
                .map(|&i| raw.features[i].clone())
                .collect();
            let pca = fit_pca(&train_rows, N_FEATURES)?;
            transform_pca(&pca, &raw.features)
        }
    };
    let train_rows: Vec<Vec<f64>> = partition
        .train
        .iter()
        .map(|&i| projected[i].clone())
        .collect();
    let scaler = fit_minmax(&train_rows)?;
    let dataset = Dataset {
        name: raw.name.clone(),
        features: scaler.transform(&projected),
        labels: raw.labels.clone(),
    };

    let partition = match config.forget_class {
        Some(f) => {
            partition_forget_anchor(&partition, &dataset, f, config.anchor_fraction, config.seed)?
        }
        None => partition,
    };
    Ok(PreparedData { dataset, partition })
}

/// The split actually used by a run, recorded as explicit row indices.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionManifest {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
    pub forget_class: Option<usize>,
    pub forget: Vec<usize>,
    pub anchor: Vec<usize>,
}

impl From<&SplitPartition> for PartitionManifest {
    fn from(p: &SplitPartition) -> Self {
        PartitionManifest {
            train: p.train.clone(),
            val: p.val.clone(),
            test: p.test.clone(),
            forget_class: p.forget_class,
            forget: p.forget.clone(),
            anchor: p.anchor.clone(),
        }
    }
}

/// Written next to every command's outputs: the full resolved configuration,
/// content hashes of the config and the data file, the exact row partition,
/// and the list of artifacts produced.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub config_sha256: String,
    pub data_path: String,
    pub data_sha256: String,
    pub partition: PartitionManifest,
    pub outputs: Vec<String>,
    pub extra: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig, partition: &SplitPartition) -> Result<Self> {
        let data_path = config.effective_data_path();
        Ok(Manifest {
            command: command.to_string(),
            seed: config.seed,
            config: config.to_kv_pairs(),
            config_sha256: config.config_hash(),
            data_path: data_path.display().to_string(),
            data_sha256: sha256_file(&data_path)?,
            partition: partition.into(),
            outputs: Vec::new(),
            extra: BTreeMap::new(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

fn create_out_dir(config: &RunConfig) -> Result<()> {
    fs::create_dir_all(&config.out_dir).map_err(|e| io_error(&config.out_dir, "creating", e))
}

fn load_checkpoint_for(config: &RunConfig, path: &Path) -> Result<Checkpoint> {
    let checkpoint = Checkpoint::load(path)?;
    if checkpoint.metadata.dataset != config.dataset.name() {
        return Err(Error::Config(format!(
            "checkpoint {} was produced on dataset '{}' but this run is configured for '{}'",
            path.display(),
            checkpoint.metadata.dataset,
            config.dataset.name()
        )));
    }
    Ok(checkpoint)
}

fn source_name(source: TargetSource) -> &'static str {
    match source {
        TargetSource::SimilarityGuided => "similarity",
        TargetSource::Uniform => "uniform",
    }
}

/// Outcome of a training or gold-retraining command.
#[derive(Clone, Debug)]
pub struct TrainSummary {
    pub model: TrainedModel,
    pub checkpoint_path: PathBuf,
    /// Accuracy over the full test split.
    pub test_accuracy: f64,
}

/// Trains the classifier on the full training split and writes the
/// checkpoint, the loss history, and the run manifest.
pub fn run_train(config: &RunConfig) -> Result<TrainSummary> {
    let mut config = config.clone();
    config.propagate_seed();
    let data = prepare_data(&config)?;
    create_out_dir(&config)?;

    let spec = CircuitSpec::build();
    let model = train(&spec, &data.dataset, &data.partition, &config.train)?;

    let checkpoint_path = config.out_dir.join(files::CHECKPOINT_TRAINED);
    Checkpoint::new(
        model.params.clone(),
        CheckpointMetadata {
            dataset: config.dataset.name().to_string(),
            seed: config.seed,
            stage: STAGE_TRAINED.to_string(),
        },
    )
    .save(&checkpoint_path)?;
    model.write_history_csv(&config.out_dir.join(files::HISTORY_TRAINED))?;

    let (test_x, test_y) = select_rows(&data.dataset, &data.partition.test);
    let cm = confusion_matrix(&spec, &model.params, &test_x, &test_y)?;
    let test_accuracy = accuracy(&cm);

    let mut manifest = Manifest::new("train", &config, &data.partition)?;
    manifest.outputs = vec![
        files::CHECKPOINT_TRAINED.to_string(),
        files::HISTORY_TRAINED.to_string(),
    ];
    manifest
        .extra
        .insert("best_iteration".into(), model.best_iteration.to_string());
    manifest
        .extra
        .insert("best_val_loss".into(), model.best_val_loss.to_string());
    manifest
        .extra
        .insert("test_accuracy".into(), test_accuracy.to_string());
    manifest.write(&config.out_dir.join(files::MANIFEST_TRAIN))?;

    Ok(TrainSummary {
        model,
        checkpoint_path,
        test_accuracy,
    })
}

/// Retrains from scratch with the forgotten class stripped from the train
/// and validation sets — the reference that unlearning is judged against.
pub fn run_gold(config: &RunConfig) -> Result<TrainSummary> {
    let mut config = config.clone();
    config.propagate_seed();
    let Some(forget_class) = config.forget_class else {
        return Err(Error::Config(
            "gold retraining requires forget_class so the retained set is defined".to_string(),
        ));
    };
    let data = prepare_data(&config)?;
    create_out_dir(&config)?;

    let spec = CircuitSpec::build();
    let model = train_gold(&spec, &data.dataset, &data.partition, &config.train)?;

    let checkpoint_path = config.out_dir.join(files::CHECKPOINT_GOLD);
    Checkpoint::new(
        model.params.clone(),
        CheckpointMetadata {
            dataset: config.dataset.name().to_string(),
            seed: config.seed,
            stage: STAGE_GOLD.to_string(),
        },
    )
    .save(&checkpoint_path)?;
    model.write_history_csv(&config.out_dir.join(files::HISTORY_GOLD))?;

    let (test_x, test_y) = select_rows(&data.dataset, &data.partition.test);
    let cm = confusion_matrix(&spec, &model.params, &test_x, &test_y)?;
    let test_accuracy = accuracy(&cm);

    let mut manifest = Manifest::new("gold", &config, &data.partition)?;
    manifest.outputs = vec![
        files::CHECKPOINT_GOLD.to_string(),
        files::HISTORY_GOLD.to_string(),
    ];
    manifest
        .extra
        .insert("best_iteration".into(), model.best_iteration.to_string());
    manifest
        .extra
        .insert("best_val_loss".into(), model.best_val_loss.to_string());
    manifest
        .extra
        .insert("test_accuracy".into(), test_accuracy.to_string());
    manifest.extra.insert(
        "retained_test_accuracy".into(),
        retained_accuracy(&cm, forget_class)?.to_string(),
    );
    manifest.write(&config.out_dir.join(files::MANIFEST_GOLD))?;

    Ok(TrainSummary {
        model,
        checkpoint_path,
        test_accuracy,
    })
}

/// Outcome of an unlearning command.
#[derive(Clone, Debug)]
pub struct UnlearnSummary {
    pub result: UnlearnResult,
    pub checkpoint_path: PathBuf,
}

/// Runs constrained gradient ascent from a trained checkpoint and writes the
/// unlearned checkpoint, the objective history, and the run manifest.
/// `checkpoint` defaults to the trained checkpoint in the output directory.
pub fn run_unlearn(config: &RunConfig, checkpoint: Option<&Path>) -> Result<UnlearnSummary> {
    let mut config = config.clone();
    config.propagate_seed();
    if config.forget_class.is_none() {
        return Err(Error::Config(
            "unlearning requires forget_class".to_string(),
        ));
    }
    let source_path =
        checkpoint.map_or_else(|| config.out_dir.join(files::CHECKPOINT_TRAINED), Path::to_path_buf);
    let original = load_checkpoint_for(&config, &source_path)?;

    let data = prepare_data(&config)?;
    create_out_dir(&config)?;

    let spec = CircuitSpec::build();
    let result = unlearn(
        &spec,
        &data.dataset,
        &data.partition,
        &original.values,
        &config.unlearn,
    )?;

    let checkpoint_path = config.out_dir.join(files::CHECKPOINT_UNLEARNED);
    Checkpoint::new(
        result.params.clone(),
        CheckpointMetadata {
            dataset: config.dataset.name().to_string(),
            seed: config.seed,
            stage: STAGE_UNLEARNED.to_string(),
        },
    )
    .save(&checkpoint_path)?;
    write_text(
        &config.out_dir.join(files::OBJECTIVE_HISTORY),
        &objective_csv(&result.objective_history),
    )?;

    let mut manifest = Manifest::new("unlearn", &config, &data.partition)?;
    manifest.outputs = vec![
        files::CHECKPOINT_UNLEARNED.to_string(),
        files::OBJECTIVE_HISTORY.to_string(),
    ];
    manifest.extra.insert(
        "source_checkpoint".into(),
        source_path.display().to_string(),
    );
    manifest
        .extra
        .insert("target_q".into(), format!("{:?}", result.target.q));
    manifest.extra.insert(
        "target_source".into(),
        source_name(result.target.source).to_string(),
    );
    if let (Some(first), Some(last)) = (
        result.objective_history.first(),
        result.objective_history.last(),
    ) {
        manifest
            .extra
            .insert("objective_first".into(), first.to_string());
        manifest
            .extra
            .insert("objective_last".into(), last.to_string());
    }
    let delta_l2 = result
        .param_delta
        .iter()
        .map(|d| d * d)
        .sum::<f64>()
        .sqrt();
    manifest
        .extra
        .insert("param_delta_l2".into(), delta_l2.to_string());
    manifest.write(&config.out_dir.join(files::MANIFEST_UNLEARN))?;

    Ok(UnlearnSummary {
        result,
        checkpoint_path,
    })
}

fn objective_csv(history: &[f64]) -> String {
    let mut out = String::from("step,objective\n");
    for (i, value) in history.iter().enumerate() {
        out.push_str(&format!("{},{value}\n", i + 1));
    }
    out
}

/// Side-by-side comparison of the original, unlearned, and gold models on
/// the test split, plus the distributional agreement between the unlearned
/// and gold models on retained-class samples.
#[derive(Clone, Debug, Serialize)]
pub struct EvalReport {
    pub dataset: String,
    pub forget_class: usize,
    pub confusion_original: ConfusionMatrix,
    pub confusion_unlearned: ConfusionMatrix,
    pub confusion_gold: ConfusionMatrix,
    pub recall_original: [f64; N_CLASSES],
    pub recall_unlearned: [f64; N_CLASSES],
    pub recall_gold: [f64; N_CLASSES],
    pub accuracy_original: f64,
    pub accuracy_unlearned: f64,
    pub accuracy_gold: f64,
    pub retained_accuracy_original: f64,
    pub retained_accuracy_unlearned: f64,
    pub retained_accuracy_gold: f64,
    /// Mean forgotten-class probability over forgotten-class test samples.
    pub forget_prob_original: f64,
    pub forget_prob_unlearned: f64,
    pub forget_prob_gold: f64,
    pub kl: KlReport,
    /// Parameter movement of the unlearned model relative to the original.
    pub param_delta: ParamDeltaSummary,
}

impl EvalReport {
    /// Plain-text rendering of the report for terminals and log files.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "dataset: {}    forget class: {}\n\n",
            self.dataset, self.forget_class
        ));
        out.push_str(&format!(
            "{:<28}{:>10}{:>11}{:>9}\n",
            "metric", "original", "unlearned", "gold"
        ));
        let mut row = |name: &str, a: f64, b: f64, c: f64| {
            out.push_str(&format!("{name:<28}{a:>10.4}{b:>11.4}{c:>9.4}\n"));
        };
        row(
            "test accuracy",
            self.accuracy_original,
            self.accuracy_unlearned,
            self.accuracy_gold,
        );
        row(
            "retained-class accuracy",
            self.retained_accuracy_original,
            self.retained_accuracy_unlearned,
            self.retained_accuracy_gold,
        );
        for class in 0..N_CLASSES {
            row(
                &format!("recall class {class}"),
                self.recall_original[class],
                self.recall_unlearned[class],
                self.recall_gold[class],
            );
        }
        row(
            "forgotten-class mean prob",
            self.forget_prob_original,
            self.forget_prob_unlearned,
            self.forget_prob_gold,
        );
        let direction = match self.kl.direction {
            KlDirection::GoldVsUnlearned => "gold ‖ unlearned",
            KlDirection::UnlearnedVsGold => "unlearned ‖ gold",
        };
        out.push_str(&format!(
            "\nKL({direction}) on retained test samples: mean {:.4} ± {:.4}, median {:.4}, max {:.4}, skipped {}\n",
            self.kl.mean, self.kl.std, self.kl.median, self.kl.max, self.kl.skipped
        ));
        out.push_str(&format!(
            "forgotten-class mass on retained test: unlearned {:.4} vs gold {:.4}\n",
            self.kl.mean_forget_prob_unlearned, self.kl.mean_forget_prob_gold
        ));
        out.push_str(&format!(
            "parameter movement: l2 {:.4}, mean {:.4}, max {:.4}\n",
            self.param_delta.l2, self.param_delta.mean, self.param_delta.max
        ));
        out
    }
}

/// Scores three parameter vectors on the prepared test split. The partition
/// must carry a forget class; KL is computed between the gold and unlearned
/// models on retained-class test samples in the requested direction.
pub fn evaluate(
    spec: &CircuitSpec,
    data: &PreparedData,
    w_original: &[f64],
    w_unlearned: &[f64],
    w_gold: &[f64],
    direction: KlDirection,
) -> Result<EvalReport> {
    let Some(forget_class) = data.partition.forget_class else {
        return Err(Error::InvalidArgument(
            "evaluation needs a partition with a forget class".to_string(),
        ));
    };
    let (test_x, test_y) = select_rows(&data.dataset, &data.partition.test);

    let confusion_original = confusion_matrix(spec, w_original, &test_x, &test_y)?;
    let confusion_unlearned = confusion_matrix(spec, w_unlearned, &test_x, &test_y)?;
    let confusion_gold = confusion_matrix(spec, w_gold, &test_x, &test_y)?;

    let forget_x: Vec<Vec<f64>> = test_x
        .iter()
        .zip(&test_y)
        .filter(|&(_, &y)| y == forget_class)
        .map(|(x, _)| x.clone())
        .collect();
    if forget_x.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "test split has no samples of forgotten class {forget_class}"
        )));
    }
    let mut retained_x = Vec::new();
    let mut retained_y = Vec::new();
    for (x, &y) in test_x.iter().zip(&test_y) {
        if y != forget_class {
            retained_x.push(x.clone());
            retained_y.push(y);
        }
    }

    let kl = kl_to_gold(
        spec,
        w_gold,
        w_unlearned,
        &retained_x,
        &retained_y,
        forget_class,
        direction,
    )?;

    Ok(EvalReport {
        dataset: data.dataset.name.clone(),
        forget_class,
        recall_original: classwise_recall(&confusion_original)?,
        recall_unlearned: classwise_recall(&confusion_unlearned)?,
        recall_gold: classwise_recall(&confusion_gold)?,
        accuracy_original: accuracy(&confusion_original),
        accuracy_unlearned: accuracy(&confusion_unlearned),
        accuracy_gold: accuracy(&confusion_gold),
        retained_accuracy_original: retained_accuracy(&confusion_original, forget_class)?,
        retained_accuracy_unlearned: retained_accuracy(&confusion_unlearned, forget_class)?,
        retained_accuracy_gold: retained_accuracy(&confusion_gold, forget_class)?,
        forget_prob_original: mean_forget_prob(spec, w_original, &forget_x, forget_class)?,
        forget_prob_unlearned: mean_forget_prob(spec, w_unlearned, &forget_x, forget_class)?,
        forget_prob_gold: mean_forget_prob(spec, w_gold, &forget_x, forget_class)?,
        kl,
        param_delta: param_delta_summary(w_unlearned, w_original)?,
        confusion_original,
        confusion_unlearned,
        confusion_gold,
    })
}

/// Loads the three checkpoints (paths default to the conventional names in
/// the output directory), evaluates them on the test split, and writes the
/// report in JSON and text form plus the three confusion matrices.
pub fn run_eval(
    config: &RunConfig,
    original: Option<&Path>,
    unlearned: Option<&Path>,
    gold: Option<&Path>,
) -> Result<EvalReport> {
    let mut config = config.clone();
    config.propagate_seed();
    if config.forget_class.is_none() {
        return Err(Error::Config(
            "evaluation requires forget_class".to_string(),
        ));
    }
    let original_path = original
        .map_or_else(|| config.out_dir.join(files::CHECKPOINT_TRAINED), Path::to_path_buf);
    let unlearned_path = unlearned.map_or_else(
        || config.out_dir.join(files::CHECKPOINT_UNLEARNED),
        Path::to_path_buf,
    );
    let gold_path =
        gold.map_or_else(|| config.out_dir.join(files::CHECKPOINT_GOLD), Path::to_path_buf);

    let w_original = load_checkpoint_for(&config, &original_path)?;
    let w_unlearned = load_checkpoint_for(&config, &unlearned_path)?;
    let w_gold = load_checkpoint_for(&config, &gold_path)?;

    let data = prepare_data(&config)?;
    create_out_dir(&config)?;
    let spec = CircuitSpec::build();
    let report = evaluate(
        &spec,
        &data,
        &w_original.values,
        &w_unlearned.values,
        &w_gold.values,
        config.kl_direction,
    )?;

    write_json(&config.out_dir.join(files::REPORT_JSON), &report)?;
    write_text(
        &config.out_dir.join(files::REPORT_TEXT),
        &report.render_text(),
    )?;
    write_text(
        &config.out_dir.join(files::CONFUSION_ORIGINAL),
        &report.confusion_original.to_csv(),
    )?;
    write_text(
        &config.out_dir.join(files::CONFUSION_UNLEARNED),
        &report.confusion_unlearned.to_csv(),
    )?;
    write_text(
        &config.out_dir.join(files::CONFUSION_GOLD),
        &report.confusion_gold.to_csv(),
    )?;

    let mut manifest = Manifest::new("eval", &config, &data.partition)?;
    manifest.outputs = vec![
        files::REPORT_JSON.to_string(),
        files::REPORT_TEXT.to_string(),
        files::CONFUSION_ORIGINAL.to_string(),
        files::CONFUSION_UNLEARNED.to_string(),
        files::CONFUSION_GOLD.to_string(),
    ];
    for (name, path) in [
        ("checkpoint_original", &original_path),
        ("checkpoint_unlearned", &unlearned_path),
        ("checkpoint_gold", &gold_path),
    ] {
        manifest
            .extra
            .insert(name.to_string(), path.display().to_string());
    }
    manifest.extra.insert("kl_mean".into(), report.kl.mean.to_string());
    manifest
        .extra
        .insert("kl_median".into(), report.kl.median.to_string());
    manifest.write(&config.out_dir.join(files::MANIFEST_EVAL))?;

    Ok(report)
}

/// One unlearning hyperparameter varied per sweep, everything else held at
/// the configured values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Beta,
    Alpha,
    Lambda,
    AnchorFraction,
    Classwise,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::Beta,
        SweepAxis::Alpha,
        SweepAxis::Lambda,
        SweepAxis::AnchorFraction,
        SweepAxis::Classwise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Beta => "beta",
            SweepAxis::Alpha => "alpha",
            SweepAxis::Lambda => "lambda",
            SweepAxis::AnchorFraction => "anchor-fraction",
            SweepAxis::Classwise => "classwise",
        }
    }

    /// File-name stem for the sweep's artifacts.
    pub fn file_slug(self) -> String {
        self.name().replace('-', "_")
    }

    pub fn parse(text: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|axis| axis.name() == text)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown sweep axis '{text}' (expected beta, alpha, lambda, \
                     anchor-fraction, or classwise)"
                ))
            })
    }

    /// Settings visited by the sweep; for the class-wise axis these are the
    /// forgotten class indices.
    pub fn values(self) -> &'static [f64] {
        match self {
            SweepAxis::Beta => &[0.25, 0.5, 0.75, 1.0],
            SweepAxis::Alpha => &[0.0, 1.0, 2.0],
            SweepAxis::Lambda => &[0.0, 0.01, 0.1],
            SweepAxis::AnchorFraction => &[0.1, 0.25, 0.5, 1.0],
            SweepAxis::Classwise => &[0.0, 1.0],
        }
    }
}

/// Post-unlearning test metrics for one sweep setting.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub forget_class: usize,
    pub overall_accuracy: f64,
    pub retained_accuracy: f64,
    /// Mean forgotten-class probability over forgotten-class test samples.
    pub forget_prob: f64,
    pub forget_recall: f64,
}

/// A sweep setting's metrics together with the full unlearning result.
#[derive(Clone, Debug)]
pub struct SweepSetting {
    pub row: SweepRow,
    pub result: UnlearnResult,
}

/// Runs one unlearning pass per axis value from the same original
/// parameters and scores each on the test split.
pub fn ablation_sweep(
    config: &RunConfig,
    w_orig: &[f64],
    axis: SweepAxis,
) -> Result<Vec<SweepSetting>> {
    let spec = CircuitSpec::build();
    let mut settings = Vec::with_capacity(axis.values().len());
    for &value in axis.values() {
        let mut cfg = config.clone();
        match axis {
            SweepAxis::Beta => cfg.unlearn.beta = value,
            SweepAxis::Alpha => cfg.unlearn.alpha = value,
            SweepAxis::Lambda => cfg.unlearn.lambda = value,
            SweepAxis::AnchorFraction => cfg.anchor_fraction = value,
            SweepAxis::Classwise => cfg.forget_class = Some(value as usize),
        }
        let data = prepare_data(&cfg)?;
        let Some(forget_class) = data.partition.forget_class else {
            return Err(Error::Config(
                "ablation sweeps require forget_class".to_string(),
            ));
        };
        let result = unlearn(
            &spec,
            &data.dataset,
            &data.partition,
            w_orig,
            &cfg.unlearn,
        )?;

        let (test_x, test_y) = select_rows(&data.dataset, &data.partition.test);
        let cm = confusion_matrix(&spec, &result.params, &test_x, &test_y)?;
        let recall = classwise_recall(&cm)?;
        let forget_x: Vec<Vec<f64>> = test_x
            .iter()
            .zip(&test_y)
            .filter(|&(_, &y)| y == forget_class)
            .map(|(x, _)| x.clone())
            .collect();
        let forget_prob = mean_forget_prob(&spec, &result.params, &forget_x, forget_class)?;

        settings.push(SweepSetting {
            row: SweepRow {
                value,
                forget_class,
                overall_accuracy: accuracy(&cm),
                retained_accuracy: retained_accuracy(&cm, forget_class)?,
                forget_prob,
                forget_recall: recall[forget_class],
            },
            result,
        });
    }
    Ok(settings)
}

/// Renders sweep rows as CSV, one line per setting.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "value,forget_class,overall_accuracy,retained_accuracy,forget_prob,forget_recall\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.value,
            r.forget_class,
            r.overall_accuracy,
            r.retained_accuracy,
            r.forget_prob,
            r.forget_recall
        ));
    }
    out
}

/// Sweeps one axis from a shared trained checkpoint, writing the sweep table,
/// one subdirectory of artifacts per setting, and the sweep manifest. When
/// the config leaves the forget class unset it defaults to
/// [`DEFAULT_ABLATION_FORGET_CLASS`].
pub fn run_ablate(
    config: &RunConfig,
    axis: SweepAxis,
    checkpoint: Option<&Path>,
) -> Result<Vec<SweepRow>> {
    let mut config = config.clone();
    config.propagate_seed();
    if config.forget_class.is_none() {
        config.forget_class = Some(DEFAULT_ABLATION_FORGET_CLASS);
    }
    let source_path =
        checkpoint.map_or_else(|| config.out_dir.join(files::CHECKPOINT_TRAINED), Path::to_path_buf);
    let original = load_checkpoint_for(&config, &source_path)?;

    let settings = ablation_sweep(&config, &original.values, axis)?;
    create_out_dir(&config)?;

    let slug = axis.file_slug();
    let sweep_dir = config.out_dir.join(format!("ablate_{slug}"));
    let mut outputs = vec![format!("sweep_{slug}.csv")];
    for setting in &settings {
        let setting_dir = sweep_dir.join(format!("{slug}_{}", setting.row.value));
        fs::create_dir_all(&setting_dir).map_err(|e| io_error(&setting_dir, "creating", e))?;
        let checkpoint_path = setting_dir.join(files::CHECKPOINT_UNLEARNED);
        Checkpoint::new(
            setting.result.params.clone(),
            CheckpointMetadata {
                dataset: config.dataset.name().to_string(),
                seed: config.seed,
                stage: STAGE_UNLEARNED.to_string(),
            },
        )
        .save(&checkpoint_path)?;
        write_text(
            &setting_dir.join(files::OBJECTIVE_HISTORY),
            &objective_csv(&setting.result.objective_history),
        )?;
        outputs.push(
            checkpoint_path
                .strip_prefix(&config.out_dir)
                .unwrap_or(&checkpoint_path)
                .display()
                .to_string(),
        );
    }

    let rows: Vec<SweepRow> = settings.iter().map(|s| s.row.clone()).collect();
    write_text(
        &config.out_dir.join(format!("sweep_{slug}.csv")),
        &sweep_csv(&rows),
    )?;

    let base = prepare_data(&config)?;
    let mut manifest = Manifest::new("ablate", &config, &base.partition)?;
    manifest.outputs = outputs;
    manifest.extra.insert("axis".into(), axis.name().to_string());
    manifest.extra.insert(
        "values".into(),
        axis.values()
            .iter()
            .map(f64::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    manifest.extra.insert(
        "source_checkpoint".into(),
        source_path.display().to_string(),
    );
    manifest.write(&config.out_dir.join(format!("manifest_ablate_{slug}.json")))?;

    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::N_PARAMS;
    use crate::data::PerClassSplit;
    use std::f64::consts::PI;

    fn repo_data(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
    }

    fn tiny_iris_config(out_dir: &Path) -> RunConfig {
        let mut config = RunConfig::default();
        config.data_path = Some(repo_data("iris.csv"));
        config.out_dir = out_dir.to_path_buf();
        config.split = Some(PerClassSplit {
            train: 6,
            val: 2,
            test: 2,
        });
        config.train.iterations = 3;
        config.train.batch_size = 5;
        config.unlearn.steps = 2;
        config
    }

    #[test]
    fn sha256_matches_the_reference_digest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.txt");
        fs::write(&path, b"abc").unwrap();
        assert_eq!(
            sha256_file(&path).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn prepare_data_scales_iris_into_the_angle_range() {
        let mut config = RunConfig::default();
        config.data_path = Some(repo_data("iris.csv"));
        let data = prepare_data(&config).unwrap();
        assert_eq!(data.dataset.len(), 150);
        assert_eq!(data.partition.train.len(), 105);
        assert_eq!(data.partition.val.len(), 30);
        assert_eq!(data.partition.test.len(), 15);
        assert!(data.partition.forget.is_empty());
        for row in &data.dataset.features {
            for &v in row {
                assert!((0.0..=PI).contains(&v));
            }
        }
    }

    #[test]
    fn prepare_data_partitions_forget_and_anchor_sets() {
        let mut config = RunConfig::default();
        config.data_path = Some(repo_data("iris.csv"));
        config.forget_class = Some(2);
        let data = prepare_data(&config).unwrap();
        assert_eq!(data.partition.forget.len(), 35);
        assert_eq!(data.partition.anchor.len(), 70);
        assert!(data
            .partition
            .forget
            .iter()
            .all(|&i| data.dataset.labels[i] == 2));
    }

    #[test]
    fn prepare_data_projects_covertype_to_four_features() {
        let mut config = RunConfig::default();
        config.dataset = DatasetKind::Covertype;
        config.data_path = Some(repo_data("covertype_sample.csv"));
        let data = prepare_data(&config).unwrap();
        assert_eq!(data.dataset.n_features(), 4);
        assert_eq!(data.dataset.class_counts(), [100, 100, 100]);
        assert_eq!(data.partition.train.len(), 180);
        assert_eq!(data.partition.test.len(), 90);
        for row in &data.dataset.features {
            for &v in row {
                assert!((0.0..=PI).contains(&v));
            }
        }
    }

    #[test]
    fn run_train_writes_deterministic_artifacts() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let summary_a = run_train(&tiny_iris_config(dir_a.path())).unwrap();
        let summary_b = run_train(&tiny_iris_config(dir_b.path())).unwrap();

        let bytes_a = fs::read(&summary_a.checkpoint_path).unwrap();
        let bytes_b = fs::read(&summary_b.checkpoint_path).unwrap();
        assert_eq!(bytes_a, bytes_b);

        assert!(dir_a.path().join(files::MANIFEST_TRAIN).exists());
        let history = fs::read_to_string(dir_a.path().join(files::HISTORY_TRAINED)).unwrap();
        assert_eq!(history.lines().count(), 4);
        assert!(history.starts_with("iteration,train_loss,val_loss,lr"));
    }

    #[test]
    fn run_unlearn_without_forget_class_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_iris_config(dir.path());
        let err = run_unlearn(&config, None).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("forget_class"));
    }

    #[test]
    fn missing_checkpoint_error_names_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_iris_config(dir.path());
        config.forget_class = Some(2);
        let err = run_unlearn(&config, None).unwrap_err();
        assert!(err
            .to_string()
            .contains(files::CHECKPOINT_TRAINED));
    }

    #[test]
    fn checkpoint_dataset_mismatch_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let iris = tiny_iris_config(dir.path());
        run_train(&iris).unwrap();

        let mut config = tiny_iris_config(dir.path());
        config.dataset = DatasetKind::Covertype;
        config.data_path = Some(repo_data("covertype_sample.csv"));
        config.split = None;
        config.forget_class = Some(2);
        let err = run_unlearn(&config, None).unwrap_err();
        let message = err.to_string();
        assert!(message.contains("iris") && message.contains("covertype"));
    }

    #[test]
    fn evaluate_against_itself_reports_zero_divergence() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_iris_config(dir.path());
        config.forget_class = Some(2);
        let data = prepare_data(&config).unwrap();
        let spec = CircuitSpec::build();
        let w = vec![0.05; N_PARAMS];
        let report = evaluate(&spec, &data, &w, &w, &w, KlDirection::GoldVsUnlearned).unwrap();
        assert_eq!(report.kl.mean, 0.0);
        assert_eq!(report.kl.max, 0.0);
        assert_eq!(report.accuracy_original, report.accuracy_unlearned);
        assert_eq!(report.forget_prob_original, report.forget_prob_gold);
        assert_eq!(report.param_delta.l2, 0.0);
        let text = report.render_text();
        assert!(text.contains("forget class: 2"));
        assert!(text.contains("recall class 0"));
    }

    #[test]
    fn sweep_axes_expose_their_contract_values() {
        assert_eq!(SweepAxis::Beta.values(), &[0.25, 0.5, 0.75, 1.0]);
        assert_eq!(SweepAxis::Alpha.values(), &[0.0, 1.0, 2.0]);
        assert_eq!(SweepAxis::Lambda.values(), &[0.0, 0.01, 0.1]);
        assert_eq!(SweepAxis::AnchorFraction.values(), &[0.1, 0.25, 0.5, 1.0]);
        assert_eq!(SweepAxis::Classwise.values(), &[0.0, 1.0]);
        for axis in SweepAxis::ALL {
            assert_eq!(SweepAxis::parse(axis.name()).unwrap(), axis);
        }
        assert!(SweepAxis::parse("gamma").is_err());
        assert_eq!(SweepAxis::AnchorFraction.file_slug(), "anchor_fraction");
    }

    #[test]
    fn ablation_sweep_scores_every_setting() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_iris_config(dir.path());
        config.forget_class = Some(1);
        config.unlearn.steps = 1;
        let w = vec![0.05; N_PARAMS];
        let settings = ablation_sweep(&config, &w, SweepAxis::Alpha).unwrap();
        assert_eq!(settings.len(), 3);
        for (setting, &value) in settings.iter().zip(SweepAxis::Alpha.values()) {
            assert_eq!(setting.row.value, value);
            assert_eq!(setting.row.forget_class, 1);
            assert!((0.0..=1.0).contains(&setting.row.overall_accuracy));
            assert!((0.0..=1.0).contains(&setting.row.forget_prob));
        }
        let csv = sweep_csv(&settings.iter().map(|s| s.row.clone()).collect::<Vec<_>>());
        assert!(csv.starts_with("value,forget_class"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn full_pipeline_writes_eval_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = tiny_iris_config(dir.path());
        config.forget_class = Some(2);
        run_train(&config).unwrap();
        run_gold(&config).unwrap();
        run_unlearn(&config, None).unwrap();
        let report = run_eval(&config, None, None, None).unwrap();
        assert!(report.kl.mean.is_finite());

        for name in [
            files::REPORT_JSON,
            files::REPORT_TEXT,
            files::CONFUSION_ORIGINAL,
            files::CONFUSION_UNLEARNED,
            files::CONFUSION_GOLD,
            files::MANIFEST_EVAL,
            files::OBJECTIVE_HISTORY,
        ] {
            assert!(dir.path().join(name).exists(), "missing {name}");
        }
        let json = fs::read_to_string(dir.path().join(files::REPORT_JSON)).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(parsed["kl"]["mean"].is_number());
        assert_eq!(parsed["forget_class"], 2);

        let manifest = fs::read_to_string(dir.path().join(files::MANIFEST_UNLEARN)).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&manifest).unwrap();
        assert_eq!(parsed["command"], "unlearn");
        assert_eq!(parsed["partition"]["forget_class"], 2);
        assert!(parsed["extra"]["target_q"].is_string());
    }

    #[test]
    fn run_gold_requires_a_forget_class() {
        let dir = tempfile::tempdir().unwrap();
        let config = tiny_iris_config(dir.path());
        let err = run_gold(&config).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }
}
