//! Command-line front end for `tetra-bridge`.
//!
//! Exit status: 0 on success, 1 when validation or certification fails,
//! 2 on I/O, parse or usage errors.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod io;
pub mod report;

pub use report::Report;

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "TETRA_BRIDGE_TOL";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] tetra_bridge::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tetra-bridge",
    version,
    about = "Classical stochastic matrices and their qubit channel images"
)]
pub struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,

    /// Entry tolerance; overrides TETRA_BRIDGE_TOL and the default 1e-9.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Basis {
    Orthonormal,
    Sic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Choi,
    Superop,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RandomKind {
    Doubly,
    Lambda,
    Generator,
}

impl RandomKind {
    pub fn tag(self) -> &'static str {
        match self {
            RandomKind::Doubly => "doubly",
            RandomKind::Lambda => "lambda",
            RandomKind::Generator => "generator",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a matrix, probability vector, generator or channel file.
    Validate { path: PathBuf },
    /// Map a stochastic matrix to its channel and certify it.
    ToChannel {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "orthonormal")]
        basis: Basis,
        #[arg(long, value_enum, default_value = "both")]
        emit: Emit,
        /// Channel file; with `--emit both` the suffixes `.superop` and `.choi` are inserted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a symmetric generator on both sides and compare exponentials.
    Lindblad {
        path: PathBuf,
        #[arg(long = "time", value_delimiter = ',', default_value = "1")]
        times: Vec<f64>,
    },
    /// Evolve a probability vector and its quantum image side by side.
    Evolve {
        qpath: PathBuf,
        ppath: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// CSV trajectory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a deterministic random corpus.
    Random {
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        kind: RandomKind,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Resolves the tolerance: flag, then environment, then the library default.
pub fn resolve_tol(flag: Option<f64>, env: Option<&str>) -> Result<f64, CliError> {
    let tol = match (flag, env) {
        (Some(t), _) => t,
        (None, Some(s)) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{TOL_ENV}={s:?} is not a number")))?,
        (None, None) => tetra_bridge::DEFAULT_TOL,
    };
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Usage(format!(
            "tolerance must be finite and nonnegative, got {tol}"
        )));
    }
    Ok(tol)
}

pub fn run(cli: &Cli, env_tol: Option<&str>) -> Result<Report, CliError> {
    let tol = resolve_tol(cli.tol, env_tol)?;
    match &cli.command {
        Command::Validate { path } => commands::validate(path, tol),
        Command::ToChannel {
            path,
            basis,
            emit,
            out,
        } => commands::to_channel(path, *basis, *emit, out.as_deref(), tol),
        Command::Lindblad { path, times } => commands::lindblad(path, times, tol),
        Command::Evolve {
            qpath,
            ppath,
            steps,
            out,
        } => commands::evolve(qpath, ppath, *steps, out, tol),
        Command::Random {
            count,
            seed,
            kind,
            out,
        } => commands::random(*count, *seed, *kind, out, tol),
    }
}
