use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rir_core::rirbounds::{DEFAULT_MARGIN_REQ, DEFAULT_RHO_BISECT_TOL};
use rir_core::specnorm::DEFAULT_TOL_AXIS;

/// Robust instability radius analysis for cyclic multi-agent networks.
///
/// Coefficient lists are comma-separated reals in descending powers of s:
/// `--den 1,4,3` means s^2 + 4s + 3.
#[derive(Debug, Parser)]
#[command(name = "cyclic-rir", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for searches and sweeps.
    #[arg(long, global = true, env = "CYCLIC_RIR_THREADS")]
    pub threads: Option<usize>,

    /// Absolute tolerance on root real parts for "on the imaginary axis".
    #[arg(long, global = true, default_value_t = DEFAULT_TOL_AXIS)]
    pub tol_axis: f64,

    /// Required stability margin for a verified stabilizer.
    #[arg(long, global = true, default_value_t = DEFAULT_MARGIN_REQ)]
    pub margin_req: f64,

    /// Bisection tolerance on rho.
    #[arg(long, global = true, default_value_t = DEFAULT_RHO_BISECT_TOL)]
    pub rho_bisect_tol: f64,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output path (a directory for `nyquist`); standard output by default.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full radius report for one network.
    #[command(subcommand)]
    Rir(RirCommand),
    /// Radius table over odd n.
    Sweep(SweepArgs),
    /// Inverse Nyquist curve, value-set band and eigenvalue markers.
    Nyquist(NyquistArgs),
    /// Check whether a given perturbation stabilizes the network.
    Verify(VerifyArgs),
    /// Homogeneous replacement of complex perturbation values.
    Homogenize(HomogenizeArgs),
}

#[derive(Debug, Subcommand)]
pub enum RirCommand {
    /// Agents h(s) = K/(tau s + 1).
    FirstOrder(FirstOrderArgs),
    /// Agents given by numerator and denominator coefficients.
    General(GeneralArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FirstOrderArgs {
    #[arg(long = "K")]
    pub gain: f64,
    #[arg(long)]
    pub tau: f64,
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GeneralArgs {
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub num: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub den: Vec<f64>,
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub n: usize,
}

/// Agent dynamics, either first-order (`--K`, `--tau`) or general
/// (`--num`, `--den`).
#[derive(Debug, Clone, Args)]
pub struct AgentArgs {
    #[arg(long = "K", requires = "tau", conflicts_with_all = ["num", "den"])]
    pub gain: Option<f64>,
    #[arg(long, requires = "gain")]
    pub tau: Option<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        requires = "den"
    )]
    pub num: Option<Vec<f64>>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        requires = "num"
    )]
    pub den: Option<Vec<f64>>,
    #[arg(long)]
    pub mu: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub agent: AgentArgs,
    /// First n of the range (inclusive); even values are skipped.
    #[arg(long, default_value_t = 3)]
    pub n_from: usize,
    /// Last n of the range (inclusive).
    #[arg(long, default_value_t = 21)]
    pub n_to: usize,
}

#[derive(Debug, Clone, Args)]
pub struct NyquistArgs {
    #[command(flatten)]
    pub agent: AgentArgs,
    #[arg(long)]
    pub n: usize,
    /// Value-set radius; defaults to rho_plus of the network.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = rir_core::nyquistdata::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Frequencies per side for the value-set band.
    #[arg(long, default_value_t = 201)]
    pub band_points: usize,
    #[arg(long, default_value_t = rir_core::nyquistdata::DEFAULT_ALPHAS)]
    pub alphas: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub agent: AgentArgs,
    #[arg(long)]
    pub n: usize,
    /// Perturbation channel as NUM:DEN coefficient lists, e.g. `1,-2:1,2` for
    /// (s-2)/(s+2). Give one (applied to every agent) or n.
    #[arg(long = "delta", allow_hyphen_values = true, required = true)]
    pub deltas: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct HomogenizeArgs {
    /// Disk radius r in (0, 1).
    #[arg(long)]
    pub r: f64,
    /// Complex value `a+bi`; repeat once per agent.
    #[arg(long = "delta", allow_hyphen_values = true, required = true)]
    pub deltas: Vec<String>,
}
