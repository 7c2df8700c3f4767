//! Stage-by-stage pipeline over file artifacts, and the review server.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod serve;

use thiserror::Error;

/// Failures with a dedicated process exit status.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("{0} candidate(s) still pending review; scenario 3 cannot be finalized")]
    Pending(usize),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::MissingInput(_) => 2,
            Failure::Pending(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }
}

/// Exit status for an error chain: the first [`Failure`] found, else 1.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<Failure>())
        .map_or(1, Failure::exit_code)
}
