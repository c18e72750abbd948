use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

/// Distributionally robust logistic regression: training, certified
/// misclassification bounds, radius calibration, and packaged experiments.
///
/// Exit codes: 0 success, 1 usage or configuration error, 2 fit did not
/// converge, 3 I/O failure.
#[derive(Debug, Parser)]
#[command(name = "drlr", version, about, long_about = None)]
pub struct Cli {
    /// Master seed for anything randomized.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for artifacts (created if absent).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Rayon thread count; omit to let the library decide.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Optional `key = value` config file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a seeded synthetic dataset and write it as CSV
    Generate(GenerateArgs),
    /// Fit a model on a CSV dataset and write model.json
    Train(TrainArgs),
    /// Sweep certified risk bounds for a trained model over a radius grid
    Risk(RiskArgs),
    /// Score certificate coverage over a radius grid on synthetic trials
    Calibrate(CalibrateArgs),
    /// Reproduce a packaged experiment (1, 2, or 3)
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Feature dimension.
    #[arg(long)]
    pub n: Option<usize>,

    /// Number of samples.
    #[arg(long)]
    pub count: Option<usize>,

    /// True weights: `sphere`, `spike`, or comma-separated numbers.
    #[arg(long)]
    pub beta: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// CSV dataset; the label column defaults to the last one.
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// Ambiguity radius; 0 trains plain logistic regression.
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Transport norm on features: l1, l2, or linf.
    #[arg(long)]
    pub norm: Option<String>,

    /// Label-flip weight: a positive number or `inf`.
    #[arg(long)]
    pub kappa: Option<String>,

    /// Iteration cap for the solver.
    #[arg(long)]
    pub max_iters: Option<usize>,

    /// Objective-change stopping tolerance.
    #[arg(long)]
    pub obj_tol: Option<f64>,

    /// Standardize features to zero mean and unit variance before fitting.
    #[arg(long)]
    pub standardize: bool,

    /// Zero-based index of the label column (default: last).
    #[arg(long)]
    pub label_column: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    /// model.json written by `drlr train`.
    #[arg(long)]
    pub model: Option<PathBuf>,

    /// CSV dataset to certify on (defaults to the training file recorded in
    /// the model artifact).
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// Radius grid: comma-separated radii or log:<lo>:<hi>:<count>.
    /// Default: 0 plus log:1e-4:1:30.
    #[arg(long)]
    pub grid: Option<String>,

    /// Zero-based index of the label column (default: last).
    #[arg(long)]
    pub label_column: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Feature dimension of the synthetic generator.
    #[arg(long)]
    pub n: Option<usize>,

    /// True weights: `sphere`, `spike`, or comma-separated numbers.
    #[arg(long)]
    pub beta: Option<String>,

    #[arg(long)]
    pub train_size: Option<usize>,

    #[arg(long)]
    pub test_size: Option<usize>,

    /// Acceptable miss probability; coverage target is 1 minus this.
    #[arg(long)]
    pub eta: Option<f64>,

    /// Radius grid: comma-separated radii or log:<lo>:<hi>:<count>.
    #[arg(long)]
    pub grid: Option<String>,

    /// Independent trials per radius.
    #[arg(long)]
    pub runs: Option<usize>,

    #[arg(long)]
    pub norm: Option<String>,

    #[arg(long)]
    pub kappa: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Which experiment: 1 (coverage vs sample count), 2 (radius sweep on
    /// synthetic data), 3 (benchmark CSV with validation-chosen radii).
    pub number: u8,

    /// Benchmark CSV for experiment 3.
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// Trials (experiments 1 and 2) or splits (experiment 3).
    #[arg(long)]
    pub runs: Option<usize>,

    /// Training sizes for experiment 1, comma separated.
    #[arg(long)]
    pub sizes: Option<String>,

    #[arg(long)]
    pub train_size: Option<usize>,

    #[arg(long)]
    pub test_size: Option<usize>,

    /// Radius grid override (same syntax as `--grid` elsewhere).
    #[arg(long)]
    pub grid: Option<String>,
}
