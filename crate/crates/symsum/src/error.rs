use std::path::PathBuf;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated (bad bound, missing table, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A requested bound exceeds a documented cap.
    #[error("resource cap exceeded: {what} = {requested} is over the cap {cap}")]
    ResourceCap {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    /// Floating-point or fixed-width integer arithmetic left its validated range.
    #[error("numeric integrity: {0}")]
    NumericIntegrity(String),

    /// An upstream invariant (e.g. a Deligne bound) does not hold on the input data.
    #[error("integrity: {0}")]
    Integrity(String),

    /// Division by a series whose leading coefficient vanishes.
    #[error("non-invertible series: {0}")]
    NonInvertible(String),

    /// Evaluation requested outside the supported domain.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// I/O failure, with the path that caused it.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A cache file exists but its header does not match what was requested.
    #[error("cache mismatch on {path}: {reason}")]
    CacheMismatch { path: PathBuf, reason: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
