//! Batch front end for the photon-delay simulations: ingest a flat key-value
//! config, run evolve/compare/sweep jobs, and emit figure-ready tables with
//! self-describing provenance headers.

pub mod compare;
pub mod config;
pub mod jobs;
pub mod output;

use thiserror::Error;

/// Errors mapped onto the process exit-code contract:
/// 0 success, 1 invariant failure, 2 configuration error.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 1,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("io error: {e}"))
    }
}

/// Worker count: explicit flag, then `PDL_DEFAULT_JOBS`, then the machine.
pub fn worker_count(flag: Option<usize>) -> usize {
    if let Some(n) = flag {
        return n.max(1);
    }
    if let Ok(env) = std::env::var("PDL_DEFAULT_JOBS") {
        if let Ok(n) = env.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
