//! Experiment runner for `horoeq-core`.
//!
//! Each subcommand reads a line-oriented config (see [`config`]), runs one
//! experiment on a thread pool and writes CSV. Output bytes depend only on
//! the config and seed, never on the thread count.

pub mod config;
pub mod exec;
pub mod experiments;
pub mod output;
mod specs;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{ConfigError, Experiment, ExperimentConfig};
pub use exec::Pool;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] horoeq_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RunError {
    /// 2 for bad input, 3 for numeric guards, 1 for the environment.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Core(e) if e.is_numeric_guard() => 3,
            RunError::Core(_) => 2,
            RunError::Io(_) | RunError::Pool(_) => 1,
        }
    }
}

/// Runs one experiment and returns the complete CSV document.
pub fn run(cfg: &ExperimentConfig, pool: &Pool) -> Result<Vec<u8>, RunError> {
    let table = match cfg.experiment() {
        Experiment::Equidistribute => experiments::equidistribute(cfg, pool)?,
        Experiment::Horocycle => experiments::horocycle(cfg, pool)?,
        Experiment::Paircorr => experiments::paircorr(cfg, pool)?,
        Experiment::Counterexample => experiments::counterexample(cfg, pool)?,
        Experiment::Diophantine => experiments::diophantine(cfg, pool)?,
        Experiment::Heights => experiments::heights(cfg, pool)?,
    };
    let header = format!("horoeq {VERSION} {}\n{}", cfg.experiment().name(), cfg.canonical());
    Ok(table.render(&header))
}

#[derive(Parser, Debug)]
#[command(name = "horoeq", version, about = "Kronecker point sets on closed horocycles: experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Averages of a test function over the Kronecker point set
    Equidistribute(Flags),
    /// Averages and Fourier coefficients over closed horocycles
    Horocycle(Flags),
    /// Pair correlation of n²α mod 1
    Paircorr(Flags),
    /// Liouville-type α whose point sets escape to the cusp
    Counterexample(Flags),
    /// Continued fractions, type estimates and min-sums
    Diophantine(Flags),
    /// Integrability and invariance of the invariant height
    Heights(Flags),
}

#[derive(clap::Args, Debug)]
struct Flags {
    /// Experiment config file
    config: PathBuf,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides `seed` in the [run] section
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(experiment: Experiment, flags: &Flags) -> Result<(), RunError> {
    let text = std::fs::read_to_string(&flags.config)?;
    let mut cfg = ExperimentConfig::parse(experiment, &text)?;
    if let Some(s) = flags.seed {
        cfg.set("run", "seed", s.to_string());
    }
    let threads = flags
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let pool = Pool::new(threads)?;
    let bytes = run(&cfg, &pool)?;
    match &flags.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (experiment, flags) = match &cli.command {
        Command::Equidistribute(f) => (Experiment::Equidistribute, f),
        Command::Horocycle(f) => (Experiment::Horocycle, f),
        Command::Paircorr(f) => (Experiment::Paircorr, f),
        Command::Counterexample(f) => (Experiment::Counterexample, f),
        Command::Diophantine(f) => (Experiment::Diophantine, f),
        Command::Heights(f) => (Experiment::Heights, f),
    };
    match execute(experiment, flags) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("horoeq {}: {e}", experiment.name());
            e.exit_code()
        }
    }
}
