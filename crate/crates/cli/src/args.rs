use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use regtsp::analysis::CheckKind;
use regtsp::solvers::SolverTag;
use regtsp::spaces::{Metric, ParamKind};

#[derive(Debug, Parser)]
#[command(name = "regtsp", version, about = "TSP heuristics on regular metric spaces")]
pub struct Cli {
    /// Master seed (default 0; for `scaling` it overrides the config's master_seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Primary output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a point set and write it as CSV.
    Sample(SampleArgs),
    /// Run one solver on a CSV point set or a fresh sample.
    Solve(SolveArgs),
    /// Run the invariant checks over many sampled instances.
    Verify(VerifyArgs),
    /// Run a scaling experiment from a TOML config.
    Scaling(ScalingArgs),
    /// Search for instances with a large nearest-neighbor ratio.
    Adversarial(AdversarialArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    #[arg(long, default_value = "cube", value_parser = parse_kind)]
    pub space: ParamKind,

    /// Ambient dimension (cube and torus; default 2).
    #[arg(long)]
    pub dim: Option<usize>,

    #[arg(long, value_enum, default_value = "euclidean")]
    pub metric: MetricArg,

    /// Address depth for attractor sampling.
    #[arg(long)]
    pub depth: Option<u32>,

    /// Shared contraction ratio for `--space ifs`.
    #[arg(long)]
    pub ratio: Option<f64>,

    /// Map translation for `--space ifs`, comma separated; repeat once per map.
    #[arg(long = "translation", value_parser = parse_vector)]
    pub translations: Vec<Vec<f64>>,

    /// TOML file with the space table; replaces the other space flags.
    #[arg(long, conflicts_with_all = ["dim", "depth", "ratio", "translations"])]
    pub space_config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Euclidean,
    Chebyshev,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::Chebyshev => Metric::Chebyshev,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RegularityArgs {
    /// Use `estimate` to sample C and D even when closed forms are known.
    #[arg(long, value_enum, default_value = "auto")]
    pub regularity: RegularityArg,

    /// Override the lower regularity constant C.
    #[arg(long)]
    pub c_lower: Option<f64>,

    /// Override the upper regularity constant D.
    #[arg(long)]
    pub d_upper: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegularityArg {
    Auto,
    Estimate,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub space: SpaceArgs,

    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub space: SpaceArgs,

    /// Headerless CSV of points; when omitted, `--n` points are sampled.
    #[arg(long)]
    pub input: Option<PathBuf>,

    #[arg(long, required_unless_present = "input")]
    pub n: Option<usize>,

    #[arg(long, default_value = "nn", value_parser = parse_solver)]
    pub solver: SolverTag,

    /// Nearest-neighbor start vertex.
    #[arg(long, default_value_t = 0)]
    pub start: usize,

    /// Also run nearest neighbor from every start and report min/median/max.
    #[arg(long)]
    pub sweep_starts: bool,

    /// Run the star, packing and bound-chain checks on the heuristic trace.
    #[arg(long)]
    pub verify: bool,

    #[command(flatten)]
    pub regularity: RegularityArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub space: SpaceArgs,

    #[arg(long)]
    pub n: usize,

    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    /// Comma-separated subset of star, packing, bound-chain, isolation, lower-bound.
    #[arg(long, value_delimiter = ',', value_parser = parse_check)]
    pub checks: Vec<CheckKind>,

    /// Skip the (report-only) greedy checks.
    #[arg(long)]
    pub no_greedy: bool,

    #[command(flatten)]
    pub regularity: RegularityArgs,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    pub config: PathBuf,

    /// Summary JSON path (overrides output.json; stdout when neither is set).
    #[arg(long)]
    pub summary: Option<PathBuf>,

    /// Append rows to an existing records file instead of replacing it.
    #[arg(long)]
    pub append: bool,

    /// Write per-solve wall times to this CSV.
    #[arg(long)]
    pub timings: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AdversarialArgs {
    #[command(flatten)]
    pub space: SpaceArgs,

    #[arg(long)]
    pub n: usize,

    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,

    #[arg(long, default_value_t = 4)]
    pub restarts: usize,

    /// Also sample this many random instances of the same size and report
    /// their median ratio and optimal-length scale.
    #[arg(long, default_value_t = 0)]
    pub baseline: usize,
}

fn parse_kind(s: &str) -> Result<ParamKind, String> {
    s.parse().map_err(|e: regtsp::Error| e.to_string())
}

fn parse_solver(s: &str) -> Result<SolverTag, String> {
    s.parse().map_err(|e: regtsp::Error| e.to_string())
}

fn parse_check(s: &str) -> Result<CheckKind, String> {
    s.trim().parse().map_err(|e: regtsp::Error| e.to_string())
}

fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect()
}
