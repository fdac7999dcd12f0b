use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use krivine::series::{Mode, DEFAULT_TAIL_TOL};
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 0x4B52_4956;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "krivine",
    version,
    about = "Krivine rounding schemes: series, constants, rounding and Monte Carlo checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Size of the worker pool; results do not depend on it
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Taylor coefficients a_n(k) of f_k with a certified tail bound
    Coeffs(CoeffsArgs),
    /// Solve for the scheme constant c and report the inverse series
    Scheme(SchemeArgs),
    /// Scheme constants over a range of k
    Trend(TrendArgs),
    /// Monte Carlo estimate of f_k(t)
    FkMc(FkMcArgs),
    /// Relax, preprocess and round an instance
    Round(PipelineArgs),
    /// Exact sign maximum of an instance
    Bruteforce(InputArgs),
    /// Per-pair z-scores of the rounded correlations against c<x_i, y_j>
    Validate(PipelineArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TruncationArgs {
    /// Target for the certified tail bound of the f_k series
    #[arg(long = "tail-tol", default_value_t = DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,

    /// Fail instead of truncating when the tail tolerance is not met
    #[arg(long = "strict-tail")]
    pub strict_tail: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub k: u32,

    #[command(flatten)]
    #[serde(flatten)]
    pub truncation: TruncationArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModeArgs {
    #[arg(long, default_value_t = Mode::Sharp)]
    pub mode: Mode,

    /// Constant C for paper mode (default: k(1 - a_0(k)))
    #[arg(long = "c-const")]
    pub c_const: Option<f64>,

    #[command(flatten)]
    #[serde(flatten)]
    pub truncation: TruncationArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SchemeArgs {
    #[arg(long)]
    pub k: u32,

    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: ModeArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrendArgs {
    #[arg(long = "k-min", default_value_t = 1)]
    pub k_min: u32,

    #[arg(long = "k-max", default_value_t = 64)]
    pub k_max: u32,

    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: ModeArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FkMcArgs {
    #[arg(long)]
    pub k: u32,

    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,

    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Instance as CSV rows or JSON {"m", "n", "entries"}
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PipelineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,

    #[arg(long, default_value_t = 1)]
    pub k: u32,

    #[command(flatten)]
    #[serde(flatten)]
    pub scheme: ModeArgs,

    /// Partition pair JSON; the sign pair is used when omitted (k = 1 only)
    #[arg(long)]
    pub partition: Option<PathBuf>,

    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Relaxation rank (default: min(m + n, 20))
    #[arg(long)]
    pub rank: Option<usize>,

    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
}
