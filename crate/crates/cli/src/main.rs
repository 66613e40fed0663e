//! `spans`: reproducible experiments on span sets of random walks and
//! Brownian motion.

mod commands;
mod output;
mod repro;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "spans", version, about = "Span sets of random walks and Brownian motion")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Master seed; every random quantity derives from it.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; without it, commands with a natural plain form print that
    /// and the rest print the JSON report.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (affects speed only, never results).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Relative tolerance for quadrature.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a lattice walk or a sampled Brownian path.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Span sets: exact (pl, lattice) or approximate (eps).
    #[command(subcommand)]
    Span(SpanCmd),
    /// Span statistics and their Monte Carlo estimators.
    #[command(subcommand)]
    Stats(StatsCmd),
    /// Box-counting dimension of rescaled lattice span sets.
    Dim(DimArgs),
    /// First and second moments of the occupation measure of spans.
    #[command(subcommand)]
    Moments(MomentsCmd),
    /// Hausdorff distance between two sets given in interval notation or JSON (`@file` reads a file).
    Hausdorff(HausdorffArgs),
    /// Hausdorff distances from rescaled walk spans to a fine reference.
    Converge(ConvergeArgs),
    /// Run every desk-scale experiment and print a summary table.
    Repro(ReproArgs),
    #[command(hide = true)]
    Fdist(FdistArgs),
}

#[derive(Subcommand, Debug)]
pub enum GenCmd {
    /// Simple random walk on Z^dim.
    Walk(WalkArgs),
    /// Brownian motion in R^dim sampled on a grid.
    Gaussian(GaussianArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct WalkArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub steps: usize,
    /// Dyadic refinement level to record (for Knight embedding).
    #[arg(long)]
    pub level: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct GaussianArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub grid_step: f64,
}

#[derive(Subcommand, Debug)]
pub enum SpanCmd {
    /// Exact span set of a piecewise-linear path.
    Pl(SpanPlArgs),
    /// Exact span set of a lattice walk.
    Lattice(SpanLatticeArgs),
    /// Median ε-span measure over independent sampled paths.
    Eps(SpanEpsArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SpanPlArgs {
    /// Path file: `time value` lines or `{"times":[..],"values":[..]}`.
    #[arg(long, conflicts_with = "demo")]
    pub input: Option<PathBuf>,
    /// Built-in path: `ex2` (tent with a gap) or `ex2n` (its perturbation, see --n).
    #[arg(long)]
    pub demo: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
}

#[derive(Args, Debug, Serialize)]
pub struct SpanLatticeArgs {
    /// Walk JSON as written by `gen walk`; otherwise a walk is generated.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SpanEpsArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub grid_step: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.025, 0.0125])]
    pub eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.05, 1.0])]
    pub window: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
}

#[derive(Subcommand, Debug)]
pub enum StatsCmd {
    /// Estimate E S₁, the mean span measure of [0,1]-restricted motion.
    Es1(Es1Args),
    /// Empirical law of F_n/n against the exact law of F.
    Fdist(FdistArgs),
    /// Mean longest zero-excursion R0/N.
    Excursions(ExcursionArgs),
    /// Probability that the span set of [0,1]-restricted motion meets a set K.
    Capacity(CapacityArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct Es1Args {
    /// `formula`, `direct` or `bounds` (quadrature of the bounding integrals).
    #[arg(long, default_value = "formula")]
    pub method: String,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct FdistArgs {
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ExcursionArgs {
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct CapacityArgs {
    /// The target set K, e.g. `[0.2,0.3]`.
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct DimArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub steps: usize,
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
}

#[derive(Subcommand, Debug)]
pub enum MomentsCmd {
    /// First moment: exact at --eps, or the ε → 0 limit without it.
    M1(M1Args),
    /// Limit of the second moment with its three contributions.
    M2(M2Args),
    /// Upper bound on the α-energy.
    Energy(EnergyArgs),
    /// Monte Carlo estimate of the first moment or of the product moment.
    Mc(McArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct M1Args {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct M2Args {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.5)]
    pub b: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct EnergyArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1.0)]
    pub l: f64,
    #[arg(long)]
    pub alpha: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct McArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Defaults to eps²/4.
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// Second threshold; with it the product moment is estimated.
    #[arg(long)]
    pub b: Option<f64>,
    /// Second radius for the product moment (defaults to eps).
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct HausdorffArgs {
    pub a: String,
    pub b: String,
}

#[derive(Args, Debug, Serialize)]
pub struct ConvergeArgs {
    /// `knight` (embedded walks) or `independent`.
    #[arg(long, default_value = "knight")]
    pub coupling: String,
    #[arg(long, value_delimiter = ',', conflicts_with = "steps")]
    pub levels: Vec<u32>,
    /// Step counts (independent coupling only).
    #[arg(long, value_delimiter = ',')]
    pub steps: Vec<u64>,
    #[arg(long, default_value_t = 9)]
    pub reference_level: u32,
    #[arg(long, default_value_t = 50)]
    pub seeds: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ReproArgs {
    /// Smaller replicate counts; numbers are noisier and bands may not hold.
    #[arg(long)]
    pub quick: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(output::exit_code(&e))
        }
    }
}
