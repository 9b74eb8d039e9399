use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("estimation failed: {0}")]
    EstimationFailure(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("simulation failed: {0}")]
    GenerationFailure(String),

    #[error("feature extraction failed for series `{label}`: {source}")]
    FeatureExtraction {
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Ingestion(#[from] IngestError),
}

/// Errors raised while loading a CSV panel.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("duplicate series label `{0}`")]
    DuplicateLabel(String),

    #[error("row {row}: cannot parse date `{value}`")]
    MalformedDate { row: usize, value: String },

    #[error("row {row}: date `{value}` is not after the previous row")]
    NonMonotoneDate { row: usize, value: String },

    #[error("row {row}, column `{column}`: missing value")]
    MissingValue { row: usize, column: String },

    #[error("row {row}, column `{column}`: `{value}` is not numeric")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("file contains no data rows")]
    Empty,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn estimation(msg: impl Into<String>) -> Self {
        Error::EstimationFailure(msg.into())
    }
}
