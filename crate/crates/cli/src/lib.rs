//! Command-line front end for `eigenbc-core`.
//!
//! [`run`] parses a command line, executes one subcommand and writes either
//! compact JSON or an indented text report. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | unreadable input or a weight that fails validation |
//! | 2 | spectral assumption violated (multiple zero, zero near the circle) |
//! | 3 | numerical failure or oracle mismatch |

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod fixtures;
pub mod format;
pub mod report;

pub use format::{Problem, SymbolFile, WeightFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] eigenbc_core::Error),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use eigenbc_core::Error as E;
        match self {
            CliError::Input(_) | CliError::Io { .. } => 1,
            CliError::Core(E::InvalidInput(_) | E::NotHermitianPd { .. }) => 1,
            CliError::Core(E::AssumptionViolation(_)) => 2,
            CliError::Core(E::NumericalFailure(_) | E::Inconsistency { .. }) => 3,
            CliError::Mismatch(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Eigen,
    Integral,
    Dft,
}

#[derive(Debug, Parser)]
#[command(name = "eigenbc", version, about = "Eigen-boundary conditions for Gaussian chains")]
pub struct Cli {
    /// Tolerance for oracle comparisons.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the coupling matrix and report the rank regime.
    Validate { file: PathBuf },
    /// Zeros of the symbol, kernel vectors and residues.
    Spectrum { file: PathBuf },
    /// Invariant boundary matrices, eigenvalue and free energy.
    Boundaries { file: PathBuf },
    /// Free energy per edge by one route.
    FreeEnergy {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Eigen)]
        method: Method,
        /// Periodic chain length for the dft route.
        #[arg(long)]
        p: Option<usize>,
    },
    /// Covariance blocks of the chain with P edges.
    Covariance {
        file: PathBuf,
        #[arg(long)]
        p: usize,
    },
    /// Seeded draws from the chain with P edges.
    Sample {
        file: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Boundary-corrected block Toeplitz determinants.
    Szego {
        /// Weight file whose symbol is used.
        file: Option<PathBuf>,
        #[arg(long)]
        p: usize,
        /// Symbol file of arbitrary order instead of a weight file.
        #[arg(long = "order-n", conflicts_with = "file")]
        order_n: Option<PathBuf>,
    },
    /// Cross-check every result against the brute-force oracles.
    Verify {
        /// Weight files; the built-in fixtures are used when none are given.
        files: Vec<PathBuf>,
        /// Number of seeded random weights (default 10 without files).
        #[arg(long)]
        random: Option<usize>,
        /// First seed of the random weights.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Result of a subcommand: the report and the exit code it implies.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub value: serde_json::Value,
    pub code: i32,
}

pub(crate) fn read_input(path: &PathBuf, stdin: &mut dyn Read) -> Result<String, CliError> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        stdin.read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(text)
}

/// Runs one command line and returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    if !(cli.tol > 0.0) {
        let _ = writeln!(err, "error: --tol must be positive");
        return 1;
    }
    match commands::execute(&cli, stdin) {
        Ok(outcome) => {
            let text = match cli.format {
                OutputFormat::Json => report::to_json(&outcome.value),
                OutputFormat::Text => report::to_text(&outcome.value),
            };
            let _ = out.write_all(text.as_bytes());
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
