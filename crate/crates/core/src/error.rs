use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Sampling produced no usable instances.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// Problem parameters are inconsistent.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Configuration or input validation failed.
    #[error("validation error: {0}")]
    Validation(String),

    /// Malformed serialized data.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
