use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the embedding, geometry, statistics and
/// classification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("signal too short: need more than {required} samples, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Broad category used by the command-line front end to pick an exit code.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidConfig(_) => ErrorKind::Validation,
            Error::Io { .. } | Error::Parse { .. } | Error::Json(_) => ErrorKind::Data,
            Error::InFile { source, .. } => source.kind(),
            Error::InvalidInput(_) | Error::TooShort { .. } | Error::DimensionMismatch { .. } => ErrorKind::Data,
            Error::DegenerateGeometry(_) | Error::Numeric(_) => ErrorKind::Numeric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Data,
    Numeric,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
