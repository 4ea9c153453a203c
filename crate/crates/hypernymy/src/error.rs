//! Error type shared across the crate.

use std::path::{Path, PathBuf};

/// Crate-wide error type.
///
/// Variants are grouped by how a batch front end should react to them:
/// usage mistakes (exit 1), semantic validation failures in otherwise
/// readable data (exit 2), and I/O failures (exit 3).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The request itself was malformed (bad flag combination, bad
    /// parameter value), independent of any input data.
    #[error("usage: {0}")]
    Usage(String),

    /// Input data was readable but semantically invalid (cycle in the
    /// graph, row of the wrong width, non-finite value, ...).
    #[error("{0}")]
    Validation(String),

    /// A file could not be read or written.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file was readable but not parseable at a specific line.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    /// Invocation mistake (bad flag value, impossible parameter).
    pub fn usage(message: impl Into<String>) -> Self {
        Error::Usage(message.into())
    }

    /// Attach a path to a raw I/O error.
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    /// Parse failure at `line` (1-based) of `path`.
    pub fn parse(path: impl AsRef<Path>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.as_ref().to_path_buf(),
            line,
            message: message.into(),
        }
    }

    /// Semantic validation failure.
    pub fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }

    /// Process exit code for batch front ends: 1 usage, 2 validation
    /// (including parse errors), 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Validation(_) | Error::Parse { .. } => 2,
            Error::Io { .. } => 3,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
