use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite {kind} value at index {index}")]
    NonFinite { kind: &'static str, index: usize },

    #[error("decision vector out of bounds at indices {indices:?}")]
    OutOfBounds { indices: Vec<usize> },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{path}: row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("indicator undefined: {0}")]
    Undefined(&'static str),

    #[error("hypervolume supports 2 or 3 objectives, got {0}")]
    UnsupportedDimension(usize),

    #[error("missing features: {}", .0.join(", "))]
    MissingFeatures(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
