use std::path::PathBuf;

use thiserror::Error;

/// Everything that aborts a command before a report is produced.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid problem file {path}: {message}")]
    InvalidProblem { path: PathBuf, message: String },
    #[error(transparent)]
    Solver(#[from] simroots::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Every error here is a usage or input problem.
    pub fn exit_code(&self) -> u8 {
        2
    }
}
