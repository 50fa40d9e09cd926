use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Train a weighted naive Bayes classifier on tabular data and explain its
/// predictions with exact Shapley values, Weight of Evidence, and sampling or
/// exhaustive cross-checks. All reports are JSON documents with sorted keys;
/// every randomized step is seeded.
#[derive(Debug, Parser)]
#[command(name = "bayes-attrib", version)]
pub struct Cli {
    /// Worker threads for per-row fan-out. Defaults to the machine
    /// parallelism; the BAYES_ATTRIB_THREADS environment variable is used
    /// when the flag is absent.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model on a CSV dataset and write it to a JSON model file.
    Train(TrainArgs),
    /// Compute per-row attributions for a dataset and write a JSON report.
    Explain(ExplainArgs),
    /// Cross-check the closed-form Shapley values against exhaustive
    /// coalition enumeration on randomly chosen rows.
    Verify(VerifyArgs),
    /// Compare two attribution methods row by row and globally.
    Compare(CompareArgs),
    /// Compute global (mean absolute) importances and write a JSON report.
    Global(GlobalArgs),
    /// Time the attribution engines on synthetic data and write a CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MarginalArg {
    /// Estimate marginals from the training rows.
    Empirical,
    /// Reconstruct marginals as the prior-weighted mixture of conditionals.
    Mixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ValueFnArg {
    /// Expected posterior of the positive class (model-agnostic flavor).
    Posterior,
    /// Log-odds game; collapses to the closed form.
    Logodds,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training CSV file (header line required).
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the target column.
    #[arg(long)]
    pub target: String,
    /// Output model file.
    #[arg(long)]
    pub out: PathBuf,
    /// Maximum interval parts per numeric variable.
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    /// Maximum group parts per categorical variable.
    #[arg(long = "max-groups", default_value_t = 10)]
    pub max_groups: usize,
    /// Pseudo-count added to every cell when estimating probabilities.
    #[arg(long, default_value_t = 0.5)]
    pub smoothing: f64,
    /// JSON file mapping every feature column to a weight in [0, 1].
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Comma-separated missing-value markers (a trailing comma adds the
    /// empty string).
    #[arg(long, default_value = "?,")]
    pub missing: String,
    /// Marginal estimation mode stored in the model.
    #[arg(long, value_enum, default_value_t = MarginalArg::Empirical)]
    pub marginal: MarginalArg,
    /// Comma-separated feature columns to keep (default: all but the target).
    #[arg(long)]
    pub columns: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// CSV file with the rows to explain (the target column is not needed).
    #[arg(long)]
    pub data: PathBuf,
    /// Attribution method: shapley | woe | multiclass | sampling | bruteforce.
    #[arg(long)]
    pub method: String,
    /// Positive class label (required for every method except multiclass).
    #[arg(long)]
    pub class: Option<String>,
    /// Output report file.
    #[arg(long)]
    pub out: PathBuf,
    /// Value function for the sampling estimator.
    #[arg(long = "value-fn", value_enum, default_value_t = ValueFnArg::Posterior)]
    pub value_fn: ValueFnArg,
    /// Permutation budget for the sampling estimator.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "?,")]
    pub missing: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Number of randomly chosen rows to check.
    #[arg(long, default_value_t = 20)]
    pub rows: usize,
    /// Maximum allowed per-coordinate deviation.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "?,")]
    pub missing: String,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// First method.
    #[arg(long)]
    pub a: String,
    /// Second method.
    #[arg(long)]
    pub b: String,
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long = "value-fn", value_enum, default_value_t = ValueFnArg::Posterior)]
    pub value_fn: ValueFnArg,
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "?,")]
    pub missing: String,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub method: String,
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long = "value-fn", value_enum, default_value_t = ValueFnArg::Posterior)]
    pub value_fn: ValueFnArg,
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "?,")]
    pub missing: String,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Output CSV file with columns method,n,d,p,budget,seconds.
    #[arg(long)]
    pub out: PathBuf,
    /// Rows per synthetic dataset.
    #[arg(long, default_value_t = 50000)]
    pub n: usize,
    /// Comma-separated variable counts.
    #[arg(long, default_value = "13")]
    pub d: String,
    /// Parts per variable.
    #[arg(long, default_value_t = 8)]
    pub p: usize,
    /// Comma-separated sampling budgets; sampling is skipped when absent.
    #[arg(long)]
    pub budget: Option<String>,
    /// Row cap for the sampling timings.
    #[arg(long = "sampling-rows", default_value_t = 100)]
    pub sampling_rows: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}
