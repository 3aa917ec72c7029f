use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use beamsplit_core::DEFAULT_PRECISION_BITS;

/// Environment variable that sets the default `--precision-bits`.
pub const PRECISION_ENV: &str = "BEAMSPLIT_PRECISION_BITS";

#[derive(Debug, Parser)]
#[command(
    name = "beamsplit",
    version,
    about = "Beamsplitter addition of photon-number distributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute Z = X ⊞_η Y and write it as pmf JSON.
    Convolve(ConvolveArgs),
    /// Integrate the heat flow of X against a thermal input over an η grid.
    Evolve(EvolveArgs),
    /// Run the identity and inequality checks and write a JSON report.
    Check(CheckArgs),
    /// Dump the radial density of the continuous counterpart as CSV.
    Density(DensityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Quadrature,
    Exact,
}

#[derive(Debug, Args)]
pub struct ConvolveArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub eta: f64,
    #[arg(long, value_enum, default_value = "quadrature")]
    pub backend: BackendArg,
    /// Highest output index; defaults to N_X + N_Y.
    #[arg(long)]
    pub mmax: Option<usize>,
    #[arg(long, env = PRECISION_ENV, default_value_t = DEFAULT_PRECISION_BITS)]
    pub precision_bits: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub lambda_y: f64,
    /// `start:step:count`, giving `start + i*step` for `i < count`; start at 1
    /// with a negative step.
    #[arg(long, allow_hyphen_values = true)]
    pub eta_grid: String,
    /// Largest integration step in τ = -ln η.
    #[arg(long, default_value_t = beamsplit_core::dynamics::heat::DEFAULT_TAU_STEP)]
    pub tau_step: f64,
    /// Use `--tau-step` as given, without the stability cap.
    #[arg(long)]
    pub no_stability_limit: bool,
    /// Number of states kept during integration.
    #[arg(long)]
    pub state_size: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub x: PathBuf,
    /// Second input; a thermal law of mean `--lambda-y` when absent.
    #[arg(long)]
    pub y: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub eta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_y: f64,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, env = PRECISION_ENV, default_value_t = DEFAULT_PRECISION_BITS)]
    pub precision_bits: u32,
    /// Include wall time, which makes reports differ between runs.
    #[arg(long)]
    pub record_timing: bool,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub x: PathBuf,
    /// Upper end of the `u` range; chosen from the tail mass when absent.
    #[arg(long)]
    pub u_max: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
