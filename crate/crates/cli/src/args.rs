use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use dapprox::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "dapprox", version, about = "Rational approximation on manifolds", args_override_self = true)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Precision budget for exact comparisons of fractional powers.
    #[arg(long, global = true, default_value_t = 256)]
    pub precision_bits: u32,

    /// Seed for α sampling.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// CSV output path; a `<path>.manifest` is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Flat `key = value` file; command-line flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Certified solution of the Dirichlet-type system at one or more budgets.
    #[command(args_override_self = true)]
    Dirichlet(DirichletArgs),
    /// Infinitely-often stream with strictly increasing q.
    #[command(args_override_self = true)]
    Cor2(Cor2Args),
    /// Rational points near a chart.
    #[command(args_override_self = true)]
    Enumerate(EnumerateArgs),
    /// Denominators q with max ||q β_i|| < ψ(q).
    #[command(args_override_self = true)]
    Bset(BsetArgs),
    /// Badly-approximable constant and emptiness check.
    #[command(args_override_self = true)]
    Counterexample(CounterexampleArgs),
    /// Box-counting dimension estimate over dyadic bands.
    #[command(args_override_self = true)]
    Dimension(DimensionArgs),
    /// Covered fraction of the scaled cover on a grid.
    #[command(name = "mtp-check", args_override_self = true)]
    MtpCheck(MtpArgs),
    /// Exponents s, η and the Jarník boundary.
    #[command(args_override_self = true)]
    Exponents(ExponentsArgs),
}

impl Cmd {
    pub fn name(&self) -> &'static str {
        match self {
            Cmd::Dirichlet(_) => "dirichlet",
            Cmd::Cor2(_) => "cor2",
            Cmd::Enumerate(_) => "enumerate",
            Cmd::Bset(_) => "bset",
            Cmd::Counterexample(_) => "counterexample",
            Cmd::Dimension(_) => "dimension",
            Cmd::MtpCheck(_) => "mtp-check",
            Cmd::Exponents(_) => "exponents",
        }
    }
}

#[derive(Args, Debug)]
pub struct ChartArgs {
    /// `plane:<β,…>[@d]`, `plane:golden`, `parabola`, `veronese:<n>`, `sphere`.
    #[arg(long)]
    pub chart: String,

    /// Parameter box `lo:hi,lo:hi,…` replacing the chart default.
    #[arg(long)]
    pub domain: Option<String>,
}

#[derive(Args, Debug)]
pub struct DirichletArgs {
    #[command(flatten)]
    pub chart: ChartArgs,

    /// Comma-separated α; omitted means seeded samples.
    #[arg(long)]
    pub alpha: Option<String>,

    /// `pow:<c>:<tau>` or `table:<path>`.
    #[arg(long)]
    pub psi: String,

    /// Budget; omitted means the first `--q-count` admissible budgets.
    #[arg(long = "Q")]
    pub q_budget: Option<u64>,

    /// Number of seeded α samples when `--alpha` is absent.
    #[arg(long, default_value_t = 1)]
    pub samples: usize,

    #[arg(long, default_value_t = 1)]
    pub q_count: usize,

    /// Search cap for admissible budgets.
    #[arg(long, default_value_t = 1_000_000)]
    pub qcap: u64,
}

#[derive(Args, Debug)]
pub struct Cor2Args {
    #[command(flatten)]
    pub chart: ChartArgs,

    /// Comma-separated α; rational or absent input is replaced by a seeded sample.
    #[arg(long)]
    pub alpha: Option<String>,

    /// Defaults to `pow:<kappa>:<tau>`.
    #[arg(long)]
    pub psi: Option<String>,

    #[arg(long)]
    pub tau: String,

    #[arg(long, default_value = "1")]
    pub kappa: String,

    #[arg(long, default_value_t = 10)]
    pub count: usize,

    /// Largest budget on the doubling ladder.
    #[arg(long, default_value_t = 1 << 32)]
    pub qcap: u64,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub chart: ChartArgs,

    #[arg(long)]
    pub psi: String,

    #[arg(long)]
    pub qmax: u64,

    /// Keep only points with gcd(p, q) = 1.
    #[arg(long)]
    pub reduced: bool,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("bound").required(true).args(["tau", "psi"])))]
pub struct BsetArgs {
    /// Comma-separated β entries (`golden`, `sqrt2`, `sqrt(n)`, rationals).
    #[arg(long)]
    pub beta: String,

    /// Bound `q^{-τ}`.
    #[arg(long)]
    pub tau: Option<String>,

    /// General bound ψ(q).
    #[arg(long)]
    pub psi: Option<String>,

    #[arg(long)]
    pub qmax: u64,
}

#[derive(Args, Debug)]
pub struct CounterexampleArgs {
    #[arg(long)]
    pub beta: String,

    #[arg(long)]
    pub qmax: u64,
}

#[derive(Args, Debug)]
pub struct DimensionArgs {
    #[command(flatten)]
    pub chart: ChartArgs,

    #[arg(long)]
    pub tau: String,

    /// Largest band k (bands reach Q = 2^k).
    #[arg(long)]
    pub bands: u32,

    /// Number of trailing bands used in the fit.
    #[arg(long, default_value_t = 6)]
    pub fit_bands: u32,
}

#[derive(Args, Debug)]
pub struct MtpArgs {
    #[command(flatten)]
    pub chart: ChartArgs,

    #[arg(long)]
    pub tau: String,

    /// Scaling exponent; defaults to `(η+1)d/(τ+1)`.
    #[arg(long)]
    pub s: Option<String>,

    /// Cells per axis.
    #[arg(long)]
    pub grid: usize,

    #[arg(long)]
    pub bands: u32,
}

#[derive(Args, Debug)]
pub struct ExponentsArgs {
    #[arg(long)]
    pub n: u32,

    #[arg(long)]
    pub m: u32,

    #[arg(long)]
    pub tau: String,
}
