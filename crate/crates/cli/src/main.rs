//! Command-line front end: bound-state spectra, spinor wavefunction tables,
//! oracle verification runs, and figure-dataset reproduction.
//!
//! Exit codes: 0 success, 1 usage/validation, 2 solver/runtime,
//! 3 verification failure.

mod commands;
mod config;
mod figures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::CliError;

#[derive(Parser)]
#[command(
    name = "dirac1d",
    version,
    about = "Bound states of the 1+1D Dirac equation with a generalized Kratzer well \
             and a pseudoscalar Coulomb term"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve analytical energy levels and emit one record per level.
    Spectrum(PhysicsArgs),
    /// Emit a normalized spinor wavefunction table for one level.
    Wavefunction(PhysicsArgs),
    /// Verify analytical levels against the independent Sturm eigensolver.
    Verify(PhysicsArgs),
    /// Reproduce a figure panel dataset (plus a gnuplot stub).
    Figure(FigureArgs),
}

/// Shared physics and I/O flags. Values resolve as command line over
/// `--config` file over defaults.
#[derive(Args, Clone, Default)]
pub struct PhysicsArgs {
    /// Fermion mass M > 0.
    #[arg(long = "M")]
    pub m: Option<f64>,
    /// Dissociation energy D > 0.
    #[arg(long = "D")]
    pub d: Option<f64>,
    /// Length parameter a > 0.
    #[arg(long)]
    pub a: Option<f64>,
    /// Pseudoscalar Coulomb strength b >= 0.
    #[arg(long)]
    pub b: Option<f64>,
    /// Kratzer shape parameter q >= 0 (default 0).
    #[arg(long)]
    pub q: Option<f64>,
    /// kratzer | coulomb | scalar | nonrel.
    #[arg(long)]
    pub regime: Option<String>,
    /// upper | lower (default upper).
    #[arg(long)]
    pub component: Option<String>,
    /// Level index or inclusive range i..j (default 0).
    #[arg(long)]
    pub n: Option<String>,
    /// json | csv (default json).
    #[arg(long)]
    pub format: Option<String>,
    /// Output path; stdout when omitted. Written atomically.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value config file; explicit flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lower-component Coulomb restriction b > 1/2: on (default) | off.
    #[arg(long = "strict-b")]
    pub strict_b: Option<String>,
    /// Report energies (and kappa, epsilon) in units of M.
    #[arg(long = "in-units-of-M")]
    pub in_units_of_m: bool,
    /// Scalar-only branch: plus (default) | minus.
    #[arg(long)]
    pub sign: Option<String>,
    /// Grid point count for wavefunction tables (default 16384).
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,
    /// Oracle cell count (default 32768).
    #[arg(long = "oracle-points")]
    pub oracle_points: Option<usize>,
    /// Disable Richardson extrapolation in verify.
    #[arg(long = "no-richardson")]
    pub no_richardson: bool,
    /// Tamper hook: offset the analytical energy by this multiple of M
    /// before verification (the run must then fail with exit 3).
    #[arg(long = "inject-energy-offset")]
    pub inject_energy_offset: Option<f64>,
}

#[derive(Args)]
struct FigureArgs {
    /// Panel id: 1a 1b 1c 2a 2b 2c 2d 3a 3b 3c.
    #[arg(long)]
    id: String,
    /// Existing directory receiving fig<ID>.csv and fig<ID>.gnuplot.
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
}

fn run() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => return Err(CliError::Usage(e.to_string())),
        Err(e) => {
            // --help / --version.
            print!("{e}");
            return Ok(());
        }
    };
    match cli.command {
        Command::Spectrum(args) => commands::cmd_spectrum(&config::resolve(&args)?),
        Command::Wavefunction(args) => commands::cmd_wavefunction(&config::resolve(&args)?),
        Command::Verify(args) => commands::cmd_verify(&config::resolve(&args)?),
        Command::Figure(args) => figures::cmd_figure(&args.id, &args.out_dir),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
