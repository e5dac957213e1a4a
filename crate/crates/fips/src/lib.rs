//! Std front end for `fips-core`: solver configuration files, CSV/JSON
//! writers, thread-parallel drivers and the `fips` command line.

pub mod cli;
pub mod config;
pub mod output;
pub mod parallel;

use fips_core::SolverConfig;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] fips_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Starting configuration for the solar heating problem. Its inner
/// subproblems are badly scaled enough that the default 500 L-BFGS
/// iterations stop well short of the optimum.
pub fn problem2_solver_config() -> SolverConfig {
    SolverConfig {
        max_inner_iters: 3000,
        ..SolverConfig::default()
    }
}
