use std::path::PathBuf;

use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("input error: {0}")]
    Ingest(tarclust_core::Error),

    #[error("{0}")]
    Estimation(tarclust_core::Error),

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Output { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Ingest(_) => 3,
            CliError::Estimation(_) => 4,
        }
    }

    /// Classify an error raised after the configuration was validated.
    pub fn from_run(e: tarclust_core::Error) -> Self {
        match e {
            tarclust_core::Error::Ingestion(_) => CliError::Ingest(e),
            _ => CliError::Estimation(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
