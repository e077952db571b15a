//! Command-line harness: run a configured solver, validate configs, and
//! run benchmark suites.

pub mod bench;
pub mod config;
pub mod function;
pub mod run;

use std::fmt;

pub use config::{load_config, parse_config, Config};

/// Exit status of a configuration problem.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status of a solver or output failure.
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<incrprox::Error> for CliError {
    fn from(e: incrprox::Error) -> Self {
        use incrprox::Error as E;
        match e {
            E::Config(_) | E::Dimension { .. } | E::Parameter(_) => CliError::Config(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

/// Output failures count as solver failures: the run itself may have worked
/// but its results are lost.
pub(crate) fn io_err(path: &std::path::Path, e: impl fmt::Display) -> CliError {
    CliError::Solver(format!("{}: {e}", path.display()))
}
