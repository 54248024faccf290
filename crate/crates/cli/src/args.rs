use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "qubofs", version, about = "QUBO-based feature selection experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a feature-selection QUBO from a dataset.
    BuildQubo(BuildQuboArgs),
    /// Solve a QUBO file, optionally with a k-hot penalty.
    Solve(SolveArgs),
    /// Sweep k, pick the best on validation data, and report the test metric.
    Sweep(SweepArgs),
    /// Score every feature with a filter method.
    Baseline(BaselineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Pick by extension: `.csv` is CSV, anything else svmlight.
    Auto,
    Csv,
    Svmlight,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// Dataset path (CSV with header, or svmlight / LETOR).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    pub format: Format,
    /// CSV label column: a header name or 0-based index. Defaults to the last column.
    #[arg(long)]
    pub label_column: Option<String>,
    /// Min-max scale every feature to [0, 1] after loading.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BuilderArgs {
    /// Equal-frequency bins for MIQUBO and binned scorers.
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    /// Sign convention for `corr`: literal or rr (relevance-redundancy).
    #[arg(long, default_value = "literal")]
    pub convention: String,
    /// Use |r| instead of r in `corr`.
    #[arg(long)]
    pub absolute: bool,
    /// Regularization added to the `boost` diagonal.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    /// sa, tabu, sd, or exact.
    #[arg(long, default_value = "sa")]
    pub solver: String,
    /// Strength of the (Σx - k)² penalty.
    #[arg(long, default_value_t = 1.0)]
    pub penalty: f64,
    #[arg(long, default_value_t = 100)]
    pub num_reads: usize,
    /// Simulated annealing sweeps per read.
    #[arg(long, default_value_t = 1000)]
    pub sweeps: usize,
    #[arg(long, requires = "beta_max")]
    pub beta_min: Option<f64>,
    #[arg(long, requires = "beta_min")]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub tabu_tenure: Option<usize>,
    #[arg(long)]
    pub tabu_max_iter: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to all cores. Results do not depend on it.
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BuildQuboArgs {
    /// miqubo, corr, or boost.
    #[arg(long)]
    pub method: String,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub builder: BuilderArgs,
    /// Output QUBO JSON; metadata goes to `<out>.meta.json`.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[arg(long)]
    pub qubo: PathBuf,
    /// Target number of ones; no penalty is added when absent.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    /// Store the solve wall-clock time in the output (breaks byte-identical reruns).
    #[arg(long)]
    pub record_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskArg {
    Clf,
    Rank,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = TaskArg::Clf)]
    pub task: TaskArg,
    /// miqubo, corr, boost, or baseline:<scorer>.
    #[arg(long)]
    pub method: String,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub builder: BuilderArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    /// Training share; defaults to 0.56 (clf) or 0.6 of the queries (rank).
    #[arg(long)]
    pub train_frac: Option<f64>,
    /// Test share for clf; validation gets the rest. Defaults to 0.3.
    #[arg(long)]
    pub test_frac: Option<f64>,
    /// Validation share of the queries for rank; test gets the rest. Defaults to 0.2.
    #[arg(long)]
    pub valid_frac: Option<f64>,
    /// Score each k by stratified cross-validation on train + validation.
    #[arg(long)]
    pub cv_folds: Option<usize>,
    #[command(flatten)]
    pub run: RunArgs,
    /// Writes `<prefix>.csv` and `<prefix>.json`.
    #[arg(long)]
    #[serde(skip)]
    pub out_prefix: PathBuf,
    /// Include per-stage wall-clock timings in the JSON report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BaselineArgs {
    /// anova, chi2, mi, pearson, boosting, or variance.
    #[arg(long)]
    pub scorer: String,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    /// Scores CSV; metadata goes to `<out>.meta.json`.
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
}
