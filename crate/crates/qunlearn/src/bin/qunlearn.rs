//! Command-line front end for the six-qubit variational classifier and its
//! class-unlearning pipeline. Every subcommand resolves its configuration in
//! three layers — built-in defaults, an optional `--config` file of dotted
//! keys, then command-line flags (flags win) — and writes its artifacts plus
//! a reproducibility manifest under the output directory.

use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};

use qunlearn::config::{apply_config_file, RunConfig};
use qunlearn::error::{Error, Result};
use qunlearn::pipeline::{
    run_ablate, run_eval, run_gold, run_train, run_unlearn, sweep_csv, SweepAxis,
};

#[derive(Parser)]
#[command(
    name = "qunlearn",
    version,
    about = "Train a six-qubit variational classifier on an exact statevector \
             simulator, forget one class via distribution-guided gradient ascent, \
             and evaluate forgetting quality against a gold retrained baseline."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the classifier and write the original checkpoint.
    Train(TrainArgs),
    /// Retrain from scratch with the forgotten class removed (the gold
    /// reference).
    Gold(GoldArgs),
    /// Forget one class from a trained checkpoint by constrained ascent.
    Unlearn(UnlearnArgs),
    /// Compare the original, unlearned, and gold checkpoints on the test
    /// split.
    Eval(EvalArgs),
    /// Sweep one unlearning hyperparameter from a shared trained checkpoint.
    Ablate(AblateArgs),
}

/// Flags shared by every subcommand.
#[derive(Args)]
struct CommonOpts {
    /// Config file of `key = value` lines with dotted keys.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Master seed for every stochastic stage.
    #[arg(long)]
    seed: Option<u64>,

    /// Directory receiving checkpoints, reports, and manifests.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Dataset to run on: iris or covertype.
    #[arg(long)]
    dataset: Option<String>,

    /// Data file location (defaults to the dataset's conventional path).
    #[arg(long, value_name = "FILE")]
    data_path: Option<PathBuf>,

    /// Extra dotted-key override, repeatable (e.g. --set train.iterations=50).
    /// Applied after all other flags.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl CommonOpts {
    fn kvs(&self) -> Vec<(String, String)> {
        let mut kv = Vec::new();
        if let Some(seed) = self.seed {
            kv.push(("seed".into(), seed.to_string()));
        }
        if let Some(dir) = &self.out_dir {
            kv.push(("out_dir".into(), dir.display().to_string()));
        }
        if let Some(dataset) = &self.dataset {
            kv.push(("dataset".into(), dataset.clone()));
        }
        if let Some(path) = &self.data_path {
            kv.push(("data.path".into(), path.display().to_string()));
        }
        kv
    }
}

/// Training-stage flags.
#[derive(Args)]
struct TrainOpts {
    /// Optimizer iterations.
    #[arg(long)]
    iterations: Option<usize>,

    /// Mini-batch size.
    #[arg(long)]
    batch_size: Option<usize>,

    /// Peak learning rate of the cosine schedule.
    #[arg(long)]
    peak_lr: Option<f64>,
}

impl TrainOpts {
    fn kvs(&self) -> Vec<(String, String)> {
        let mut kv = Vec::new();
        if let Some(v) = self.iterations {
            kv.push(("train.iterations".into(), v.to_string()));
        }
        if let Some(v) = self.batch_size {
            kv.push(("train.batch_size".into(), v.to_string()));
        }
        if let Some(v) = self.peak_lr {
            kv.push(("train.peak_lr".into(), v.to_string()));
        }
        kv
    }
}

/// Forget-set selection flags.
#[derive(Args)]
struct ForgetOpts {
    /// Class index to forget (0, 1, or 2).
    #[arg(long)]
    forget_class: Option<usize>,

    /// Fraction of each retained class kept in the anchor set.
    #[arg(long)]
    anchor_fraction: Option<f64>,
}

impl ForgetOpts {
    fn kvs(&self) -> Vec<(String, String)> {
        let mut kv = Vec::new();
        if let Some(v) = self.forget_class {
            kv.push(("forget_class".into(), v.to_string()));
        }
        if let Some(v) = self.anchor_fraction {
            kv.push(("anchor_fraction".into(), v.to_string()));
        }
        kv
    }
}

/// Unlearning-stage flags.
#[derive(Args)]
struct UnlearnOpts {
    /// Weight of the anchor retention term.
    #[arg(long)]
    alpha: Option<f64>,

    /// Weight of the parameter-anchoring penalty.
    #[arg(long)]
    lambda: Option<f64>,

    /// Sharpness of the similarity-guided target.
    #[arg(long)]
    beta: Option<f64>,

    /// Ascent steps.
    #[arg(long)]
    steps: Option<usize>,

    /// Ascent learning rate.
    #[arg(long)]
    lr: Option<f64>,

    /// Target distribution source: similarity or uniform.
    #[arg(long)]
    target: Option<String>,

    /// Fraction of the forget set used to calibrate the target.
    #[arg(long)]
    calibration_fraction: Option<f64>,
}

impl UnlearnOpts {
    fn kvs(&self) -> Vec<(String, String)> {
        let mut kv = Vec::new();
        if let Some(v) = self.alpha {
            kv.push(("unlearn.alpha".into(), v.to_string()));
        }
        if let Some(v) = self.lambda {
            kv.push(("unlearn.lambda".into(), v.to_string()));
        }
        if let Some(v) = self.beta {
            kv.push(("unlearn.beta".into(), v.to_string()));
        }
        if let Some(v) = self.steps {
            kv.push(("unlearn.steps".into(), v.to_string()));
        }
        if let Some(v) = self.lr {
            kv.push(("unlearn.lr".into(), v.to_string()));
        }
        if let Some(v) = &self.target {
            kv.push(("unlearn.target".into(), v.clone()));
        }
        if let Some(v) = self.calibration_fraction {
            kv.push(("unlearn.calibration_fraction".into(), v.to_string()));
        }
        kv
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    train: TrainOpts,
}

#[derive(Args)]
struct GoldArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    train: TrainOpts,
    #[command(flatten)]
    forget: ForgetOpts,
}

#[derive(Args)]
struct UnlearnArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    forget: ForgetOpts,
    #[command(flatten)]
    unlearn: UnlearnOpts,

    /// Trained checkpoint to start from (defaults to the one in out-dir).
    #[arg(long, value_name = "FILE")]
    checkpoint: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    forget: ForgetOpts,

    /// Original checkpoint (defaults to the trained one in out-dir).
    #[arg(long, value_name = "FILE")]
    original: Option<PathBuf>,

    /// Unlearned checkpoint (defaults to the one in out-dir).
    #[arg(long, value_name = "FILE")]
    unlearned: Option<PathBuf>,

    /// Gold retrained checkpoint (defaults to the one in out-dir).
    #[arg(long, value_name = "FILE")]
    gold: Option<PathBuf>,

    /// KL direction: gold-vs-unlearned or unlearned-vs-gold.
    #[arg(long)]
    kl_direction: Option<String>,
}

#[derive(Args)]
struct AblateArgs {
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    forget: ForgetOpts,
    #[command(flatten)]
    unlearn: UnlearnOpts,

    /// Sweep axis: beta, alpha, lambda, anchor-fraction, or classwise.
    #[arg(long)]
    axis: String,

    /// Trained checkpoint shared by every setting (defaults to the one in
    /// out-dir).
    #[arg(long, value_name = "FILE")]
    checkpoint: Option<PathBuf>,
}

/// Resolves the layered configuration: defaults, then the config file, then
/// flag key/value pairs, then `--set` overrides.
fn build_config(common: &CommonOpts, flag_kvs: Vec<(String, String)>) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    if let Some(path) = &common.config {
        apply_config_file(&mut config, path)?;
    }
    for (key, value) in common.kvs().into_iter().chain(flag_kvs) {
        config.apply(&key, &value)?;
    }
    for entry in &common.set {
        let (key, value) = entry.split_once('=').ok_or_else(|| {
            Error::Config(format!("--set expects KEY=VALUE, got '{entry}'"))
        })?;
        config.apply(key.trim(), value.trim())?;
    }
    config.propagate_seed();
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => {
            let config = build_config(&args.common, args.train.kvs())?;
            let summary = run_train(&config)?;
            println!(
                "trained on {}: best iteration {}, val loss {:.6}, test accuracy {:.4}",
                config.dataset.name(),
                summary.model.best_iteration,
                summary.model.best_val_loss,
                summary.test_accuracy
            );
            println!("checkpoint: {}", summary.checkpoint_path.display());
        }
        Command::Gold(args) => {
            let mut kvs = args.train.kvs();
            kvs.extend(args.forget.kvs());
            let config = build_config(&args.common, kvs)?;
            let summary = run_gold(&config)?;
            println!(
                "gold retrained on {} without class {}: best iteration {}, val loss {:.6}, \
                 test accuracy {:.4}",
                config.dataset.name(),
                config.forget_class.expect("checked by run_gold"),
                summary.model.best_iteration,
                summary.model.best_val_loss,
                summary.test_accuracy
            );
            println!("checkpoint: {}", summary.checkpoint_path.display());
        }
        Command::Unlearn(args) => {
            let mut kvs = args.forget.kvs();
            kvs.extend(args.unlearn.kvs());
            let config = build_config(&args.common, kvs)?;
            let summary = run_unlearn(&config, args.checkpoint.as_deref())?;
            let history = &summary.result.objective_history;
            println!(
                "unlearned class {}: target q = {:?}, objective {:.6} -> {:.6} over {} steps",
                summary.result.target.forget_class,
                summary.result.target.q,
                history.first().copied().unwrap_or(f64::NAN),
                history.last().copied().unwrap_or(f64::NAN),
                history.len()
            );
            println!("checkpoint: {}", summary.checkpoint_path.display());
        }
        Command::Eval(args) => {
            let mut kvs = args.forget.kvs();
            if let Some(direction) = &args.kl_direction {
                kvs.push(("eval.kl_direction".into(), direction.clone()));
            }
            let config = build_config(&args.common, kvs)?;
            let report = run_eval(
                &config,
                args.original.as_deref(),
                args.unlearned.as_deref(),
                args.gold.as_deref(),
            )?;
            print!("{}", report.render_text());
        }
        Command::Ablate(args) => {
            let axis = SweepAxis::parse(&args.axis)?;
            let mut kvs = args.forget.kvs();
            kvs.extend(args.unlearn.kvs());
            let config = build_config(&args.common, kvs)?;
            let rows = run_ablate(&config, axis, args.checkpoint.as_deref())?;
            print!("{}", sweep_csv(&rows));
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        process::exit(e.exit_code());
    }
}
