//! Command-line front end for `thermal-jcm-core`.
//!
//! Every subcommand writes a CSV table, a JSON sidecar next to it (`.json`
//! extension) echoing the resolved configuration and library version, and,
//! with `--svg`, a line plot. Exit codes: 0 success, 1 usage or domain error,
//! 2 guard trip or failed verification.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod output;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "THERMAL_JCM_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(thermal_jcm_core::Error),
    /// A check ran to completion and failed.
    Verification(String),
    NonFinite(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_guard() => 2,
            CliError::Verification(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) if e.is_guard() => write!(f, "guard tripped: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::NonFinite(m) => write!(f, "non-finite value in output at {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<thermal_jcm_core::Error> for CliError {
    fn from(e: thermal_jcm_core::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "thermal-jcm",
    version,
    about = "Jaynes-Cummings population inversion at zero and low temperature",
    long_about = "Jaynes-Cummings population inversion at zero and low temperature.\n\n\
        Units: hbar = k_B = 1. Times and frequencies are in the units of the \
        supplied omega0, omega and kappa; angles (theta, phi) are in radians.\n\
        Settings may come from a key=value file via --config; flags override it."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// <sigma_z(t)> from the third-order expansion, with per-order parts.
    Inversion(InversionArgs),
    /// Revival period over a range of theta and a fit of ln T against theta.
    SweepTheta(SweepArgs),
    /// Revival period at one temperature.
    Period(PeriodArgs),
    /// Ground-state index and excitation gap against kappa.
    Spectrum(SpectrumArgs),
    /// Refined zeros of the excitation gap.
    Gap(SpectrumArgs),
    /// Short-time curvature with counter-rotating terms, fitted and closed form.
    ShortTime(ShortTimeArgs),
    /// Checks the operator identity catalog.
    Verify(VerifyArgs),
    /// Expansion against the brute-force thermal state.
    OracleCompare(CompareArgs),
    /// Datasets behind a figure or table.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct IoArgs {
    /// key=value settings file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV output path. The sidecar goes next to it with a .json extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Atomic transition frequency.
    #[arg(long, allow_negative_numbers = true)]
    pub omega0: Option<f64>,
    /// Field mode frequency.
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Atom-field coupling.
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Coherent amplitude (real).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ThermalArgs {
    /// Inverse temperature.
    #[arg(long, conflicts_with = "theta", allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Boson TFD angle; the fermion angle follows from the same beta.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    /// Number of intervals; the grid has steps + 1 points.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct WindowArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub window_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub window_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct InversionArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub thermal: ThermalArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Photon-number cutoff of the Poisson sums.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub theta_lo: Option<f64>,
    #[arg(long)]
    pub theta_hi: Option<f64>,
    /// Number of theta values, endpoints included.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub thermal: ThermalArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub kappa_max: Option<f64>,
    /// Number of kappa intervals on [0, kappa_max].
    #[arg(long)]
    pub kappa_steps: Option<usize>,
    /// Highest doublet index searched.
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ShortTimeArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Mean photon number of the initial coherent state.
    #[arg(long)]
    pub nbar: Option<f64>,
    /// Phase of the coherent amplitude.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Boson angle for the thermal closed form (reported, not checked).
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Allowed relative deviation of the fitted curvature.
    #[arg(long)]
    pub rel_tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Check the whole catalog (the default when no --identity is given).
    #[arg(long, conflicts_with = "identities")]
    pub all: bool,
    /// Check only these identities (by name, see --list).
    #[arg(long = "identity")]
    pub identities: Vec<String>,
    /// Print identity names and exit.
    #[arg(long)]
    pub list: bool,
    #[arg(long)]
    pub max_power: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub buffer: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub thermal: ThermalArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub n: Option<usize>,
    /// Levels per boson mode of the brute-force state.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Figure number, 1 to 9.
    #[arg(long, conflicts_with = "table", required_unless_present = "table")]
    pub figure: Option<u8>,
    /// Table number, 1 or 2.
    #[arg(long)]
    pub table: Option<u8>,
}

/// Parses `argv` (program name first), runs, prints errors to stderr and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(cli.command) {
        Ok(report) => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            // a closed pipe (e.g. `| head`) is not an error once the files are written
            for line in report {
                if writeln!(out, "{line}").is_err() {
                    break;
                }
            }
            0
        }
        Err(e) => {
            eprintln!("thermal-jcm: {e}");
            e.exit_code()
        }
    }
}
