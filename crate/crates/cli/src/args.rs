use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "occtime", version, about = "Occupation-time laws: tables, identity checks and simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a law's cdf and pdf.
    Density(DensityArgs),
    /// Run verification suites; exits 1 if any check fails.
    Check(CheckArgs),
    /// Simulate occupation fractions and compare with the analytic law.
    Simulate(SimulateArgs),
    /// Invert a law's cdf.
    Quantile(QuantileArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawKind {
    Lamperti,
    Bfry,
    Arcsine,
    Bridge,
    Excursion,
}

#[derive(Debug, Clone, Default, Args)]
pub struct LawParams {
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Skewness of the Bessel process or bridge.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Positivity parameter of the generalized arcsine law.
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(value_enum)]
    pub law: LawKind,
    #[command(flatten)]
    pub params: LawParams,
    /// Number of equispaced interior grid points.
    #[arg(long, default_value_t = 99)]
    pub grid: usize,
    /// Evaluate at a single point instead of a grid.
    #[arg(long)]
    pub x: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Transforms,
    Asymptotics,
    Semigroup,
    All,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Restrict the parameter grid to these values.
    #[command(flatten)]
    pub params: LawParams,
    /// Transform arguments: `KMIN:KMAX` for powers of two, or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_grid: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Bm,
    Bridge,
    SkewBridge,
    Stable,
    WalkExact,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Skewness for `skew-bridge`.
    #[arg(long)]
    pub p: Option<f64>,
    /// Stable index for `stable`, in (1, 2).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Skewness of the stable law, in [-1, 1].
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub skew: f64,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 4096)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Half-length of the walk bridges for `walk-exact`.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct QuantileArgs {
    #[arg(value_enum)]
    pub law: LawKind,
    #[command(flatten)]
    pub params: LawParams,
    /// Probability level in (0, 1).
    #[arg(long)]
    pub q: f64,
    /// Use a saved table (CSV or JSON) to bracket the root.
    #[arg(long)]
    pub table: Option<PathBuf>,
}
