use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "a2bcd-bench", version, about = "Run, time and check accelerated block coordinate descent")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a solver and write its trace, summary and plot script.
    Solve(SolveArgs),
    /// Measure the staleness of the parallel runtime without moving the iterate.
    Dryrun(DryrunArgs),
    /// Compare expected errors on the worst-case problem against the lower bound.
    Lowerbound(LowerBoundArgs),
    /// Integrate the continuous-time model and check its energies.
    Ode(OdeArgs),
    /// Compare two groups of recorded traces.
    Compare(CompareArgs),
}

impl Command {
    pub fn config_file(&self) -> Option<&PathBuf> {
        match self {
            Command::Solve(a) => a.config.as_ref(),
            Command::Dryrun(a) => a.config.as_ref(),
            Command::Lowerbound(a) => a.config.as_ref(),
            Command::Ode(a) => a.config.as_ref(),
            Command::Compare(a) => a.config.as_ref(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemKind {
    /// Block-diagonal quadratic with a prescribed condition number.
    Quadratic,
    /// Ridge dual on a generated sparse dataset.
    Ridge,
    /// Ridge dual on a LIBSVM file given by `--data`.
    Libsvm,
    /// Tridiagonal worst-case instance.
    WorstCase,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum, default_value = "quadratic")]
    pub problem: ProblemKind,
    #[arg(long, default_value_t = 100)]
    pub n_blocks: usize,
    /// Coordinates per block. Quadratics default to 2, ridge problems to 1.
    #[arg(long)]
    pub block_size: Option<usize>,
    #[arg(long, default_value_t = 1e3)]
    pub kappa: f64,
    #[arg(long, default_value_t = 200)]
    pub features: usize,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.1)]
    pub density: f64,
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Ridge regularization. A comma list runs one solve per value.
    #[arg(long, value_delimiter = ',', default_value = "1e-2")]
    pub lambda: Vec<f64>,
    /// Seed for generated problem data, independent of the run seed.
    #[arg(long, default_value_t = 0)]
    pub problem_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    A2bcd,
    NuAcdm,
    Rbcd,
}

impl SolverKind {
    pub fn label(self) -> &'static str {
        match self {
            SolverKind::A2bcd => "a2bcd",
            SolverKind::NuAcdm => "nu_acdm",
            SolverKind::Rbcd => "rbcd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantKind {
    Main,
    Extension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DelayKind {
    Zero,
    Constant,
    Random,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SolveArgs {
    /// Flat `key = value` file. Flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "a2bcd-out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value = "a2bcd")]
    pub solver: SolverKind,
    /// 1 runs the deterministic delay simulator, more runs threads.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Delay bound. Sets psi unless `--psi` is given.
    #[arg(long)]
    pub tau: Option<usize>,
    /// Asynchronicity parameter, overriding the one implied by `--tau`.
    #[arg(long)]
    pub psi: Option<f64>,
    #[arg(long, value_enum, default_value = "main")]
    pub variant: VariantKind,
    /// Accept a schedule outside the theory window.
    #[arg(long)]
    pub allow_wide: bool,
    /// Simulated delay model for single-worker runs.
    #[arg(long, value_enum, default_value = "constant")]
    pub delay: DelayKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub iterations: Option<u64>,
    /// Wall-clock budget, parallel runs only. Wins over `--iterations`.
    #[arg(long)]
    pub seconds: Option<f64>,
    #[arg(long)]
    pub checkpoint_every: Option<u64>,
    #[arg(long, default_value_t = 50)]
    pub monitor_ms: u64,
    #[arg(long)]
    pub staleness_cap: Option<u64>,
    #[arg(long)]
    pub restart_period: Option<u64>,
    #[arg(long)]
    pub target_gap: Option<f64>,
    /// Record wall-clock seconds in single-worker traces.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct DryrunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "a2bcd-dryrun")]
    pub out: PathBuf,
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 2)]
    pub workers: usize,
    #[arg(long, default_value_t = 1.0)]
    pub seconds: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct LowerBoundArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Block condition numbers `L_i / sigma`.
    #[arg(long, value_delimiter = ',', default_value = "9,9")]
    pub kappas: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Block dimension.
    #[arg(long, default_value_t = 20)]
    pub b: usize,
    /// Iteration counts to evaluate.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = 500)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OdeDelayKind {
    Constant,
    Random,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct OdeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "a2bcd-ode")]
    pub out: PathBuf,
    /// Diagonal quadratic potential.
    #[arg(long, value_delimiter = ',', conflicts_with = "logcosh")]
    pub diag: Option<Vec<f64>>,
    /// Log-cosh toy potential with these weights.
    #[arg(long, value_delimiter = ',')]
    pub logcosh: Option<Vec<f64>>,
    #[arg(long, default_value_t = 2)]
    pub n_blocks: usize,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long, default_value_t = 60.0)]
    pub horizon: f64,
    /// Continuous-time delay.
    #[arg(long, conflicts_with = "tau_fraction")]
    pub tau: Option<f64>,
    /// Delay as a fraction of the largest delay the theory covers.
    #[arg(long)]
    pub tau_fraction: Option<f64>,
    #[arg(long, value_enum, default_value = "constant")]
    pub mode: OdeDelayKind,
    #[arg(long, value_delimiter = ',')]
    pub y0: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub v0: Option<Vec<f64>>,
    /// Allowed relative increase between consecutive samples.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricKind {
    Fx,
    Fy,
    Rho,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisKind {
    Iterations,
    Seconds,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct CompareArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trace CSV files of group A.
    #[arg(long, value_delimiter = ',', required = true)]
    pub a: Vec<PathBuf>,
    /// Trace CSV files of group B.
    #[arg(long, value_delimiter = ',', required = true)]
    pub b: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "fy")]
    pub metric: MetricKind,
    #[arg(long, value_enum, default_value = "iterations")]
    pub axis: AxisKind,
    /// Absolute targets.
    #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-4,1e-6")]
    pub targets: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub quantile: f64,
    #[arg(long, default_value_t = 1000)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
