//! Command-line driver.
//!
//! Exit codes: 0 success, 1 invalid input or configuration, 2 numerical or
//! I/O failure, 3 a verification or benchmark assertion failed.

mod bench;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use bench::{cmd_bench, BenchReport, BenchRow, BENCH_ASSERT_MIN_N};
use config::RunConfig;

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Default output directory when neither a flag, the config nor the
/// environment names one.
pub const DEFAULT_OUT_DIR: &str = "fbmre-out";

#[derive(Debug, Parser)]
#[command(
    name = "fbmre",
    version,
    about = "Persistence of fractional Brownian motion with random Hurst exponent"
)]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed (required here or in the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory; falls back to the config, then `FBMRE_OUT_DIR`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Persistence curve over horizons and its fitted exponent.
    Persist,
    /// Small-barrier probabilities over epsilons and their fitted exponent.
    SmallBarrier,
    /// Numerical verification of the analytic bounds.
    Verify {
        /// Comma-separated subset of checks.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
    },
    /// Circulant against Cholesky sampler throughput.
    Bench,
    /// Write sample paths to CSV.
    Simulate,
}

fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERICAL
    }
}

fn run(cli: Cli) -> Result<i32> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let seed = match cli.seed {
        Some(s) => s,
        None => cfg.require_seed()?,
    };
    let workers = cli.workers.or(cfg.workers).unwrap_or(0);
    let out = cli
        .out
        .or_else(|| cfg.out_dir.clone())
        .or_else(|| std::env::var_os("FBMRE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    match cli.command {
        Command::Persist => {
            commands::cmd_persist(&cfg.persist.unwrap_or_default(), seed, workers, &out)?;
            Ok(EXIT_OK)
        }
        Command::SmallBarrier => {
            commands::cmd_small_barrier(&cfg.small_barrier.unwrap_or_default(), seed, workers, &out)?;
            Ok(EXIT_OK)
        }
        Command::Verify { checks } => {
            let r = commands::cmd_verify(&cfg.verify.unwrap_or_default(), &checks, seed, workers, &out)?;
            Ok(if r.all_passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Bench => {
            let r = cmd_bench(&cfg.bench.unwrap_or_default(), seed, &out)?;
            Ok(if r.all_passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Simulate => {
            commands::cmd_simulate(&cfg.simulate.unwrap_or_default(), seed, &out)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
