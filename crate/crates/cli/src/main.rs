//! `fcgle`: solve runs, convergence studies, engine benchmarks and
//! coefficient inspection for the space-fractional complex Ginzburg-Landau
//! equation.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 an iterative solve
//! hit its iteration cap, 3 the solution blew up.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fcgle_core::{FdOrder, Precision};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(fcgle_core::Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<fcgle_core::Error> for CliError {
    fn from(e: fcgle_core::Error) -> Self {
        match e {
            fcgle_core::Error::Config(m) => CliError::Config(m),
            other => CliError::Core(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(fcgle_core::Error::BlowUp { .. }) => 3,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "fcgle", version, about = "Space-fractional complex Ginzburg-Landau solvers")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrecisionArg {
    Single,
    Double,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Single => Precision::Single,
            PrecisionArg::Double => Precision::Double,
        }
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `run.precision`.
    #[arg(long, value_enum)]
    precision: Option<PrecisionArg>,
    /// Adds one discarded run before the timed ones.
    #[arg(long)]
    warmup: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Runs one configuration and writes run.csv, snapshots and a summary.
    Solve(RunArgs),
    /// Error against step size (or grid size) with a fitted order.
    Convergence(RunArgs),
    /// Wall-clock comparison of two engines.
    Bench(RunArgs),
    /// Prints stencil coefficients and the operator spectrum.
    Coeffs {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 2)]
        fd_order: u8,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Interval length; the grid spacing is `length / (n + 1)`.
        #[arg(long, default_value_t = 2.0)]
        length: f64,
        /// Also write coeffs.csv and eigenvalues.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<commands::Outcome, CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Solve(a) => commands::solve(&commands::Resolved::new(&a)?),
        Command::Convergence(a) => commands::convergence(&commands::Resolved::new(&a)?),
        Command::Bench(a) => commands::bench(&commands::Resolved::new(&a)?),
        Command::Coeffs {
            alpha,
            fd_order,
            n,
            length,
            out,
        } => {
            let fd = FdOrder::try_from(fd_order).map_err(CliError::Config)?;
            commands::coeffs(alpha, fd, n, length, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(outcome) if outcome.nonconverged > 0 => {
            eprintln!(
                "warning: {} iterative solves stopped at the iteration cap",
                outcome.nonconverged
            );
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
