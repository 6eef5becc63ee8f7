use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A record-level failure while ingesting a file.
    #[error("{}:{line}: {source}", path.display())]
    AtLine {
        path: PathBuf,
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A referenced record does not exist, e.g. `unknown paper x1`.
    #[error("unknown {kind} {id}")]
    NotFound { kind: &'static str, id: String },

    /// A uniqueness rule was violated on ingest, e.g. `duplicate paper_id 0901.0001`.
    #[error("duplicate {field} {id}")]
    Duplicate { field: &'static str, id: String },

    #[error("invalid {what}: {reason}")]
    Validation { what: &'static str, reason: String },

    #[error("conflict: {0}")]
    Conflict(String),

    /// The name has no letters that survive ASCII dumb-down.
    #[error("name {0:?} has no ASCII-mappable letters")]
    UnmappableName(String),
}

impl Error {
    pub(crate) fn not_found(kind: &'static str, id: impl Into<String>) -> Self {
        Error::NotFound {
            kind,
            id: id.into(),
        }
    }

    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation {
            what,
            reason: reason.into(),
        }
    }
}
