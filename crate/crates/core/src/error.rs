use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },

    /// A document violates the corpus schema or one of its invariants.
    #[error("document {doc_id}: {field}: {message}")]
    Validation {
        doc_id: String,
        field: String,
        message: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch in {what}: {left} vs {right}")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    /// The requested quantity has no defined value for this input
    /// (zero variance, zero expected disagreement, a single class, ...).
    #[error("undefined: {0}")]
    Undefined(String),

    #[error("feature set FS{set} requires {resource}, which was not supplied")]
    MissingResource { set: u8, resource: &'static str },

    #[error("feature configuration mismatch: model expects {model}, resources provide {supplied}")]
    ConfigMismatch { model: String, supplied: String },

    #[error("unsupported model file version {found} (this build reads version {expected})")]
    Version { found: String, expected: String },

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(err: &serde_json::Error) -> Self {
        Error::Json {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
