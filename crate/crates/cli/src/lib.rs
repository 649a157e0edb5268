//! Argument definitions and command implementations for the `semshap`
//! binary. Commands write their human-readable summary to the supplied
//! writer so they can be driven in-process.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use semshap::KernelKind;

mod commands;

pub use commands::{cmd_eval, cmd_psd_check, cmd_score, cmd_sweep_beta, parse_methods, run};

#[derive(Debug, Parser)]
#[command(
    name = "semshap",
    version,
    about = "Shapley uncertainty for sampled LLM answers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every record with one or more uncertainty methods.
    Score(ScoreArgs),
    /// Label records and report AUROC per method.
    Eval(EvalArgs),
    /// Shapley AUROC over a grid of kernel scales.
    SweepBeta(SweepArgs),
    /// Report raw and kernelized minimum eigenvalues per record.
    PsdCheck(PsdArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct KernelArgs {
    #[arg(long, default_value = "gaussian")]
    pub kernel: KernelKind,
    /// Number of sampled permutations when a record is too large for exact
    /// enumeration.
    #[arg(long, default_value_t = 20_000)]
    pub mc_permutations: usize,
    /// Largest answer count scored exactly.
    #[arg(long, default_value_t = 12)]
    pub mc_threshold: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub entail: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated method names, or `all`.
    #[arg(long, default_value = "shapley")]
    pub method: String,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub se_threshold: f64,
    #[command(flatten)]
    pub kernel: KernelArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Generations file; repeat once per dataset.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Entailment file matching each `--input`, in the same order.
    #[arg(long, required = true)]
    pub entail: Vec<PathBuf>,
    /// `start:stop:step`, both endpoints included.
    #[arg(long)]
    pub grid: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    #[command(flatten)]
    pub kernel: KernelArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PsdArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub entail: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long, default_value = "gaussian")]
    pub kernel: KernelKind,
    /// Optional machine-readable copy of the report.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
}
