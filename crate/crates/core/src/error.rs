use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = AesError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AesError {
    #[error("input is not valid UTF-8: {0}")]
    Decode(#[from] std::str::Utf8Error),

    /// A data row violated a corpus or prompt constraint. `row` is 1-based and
    /// counts the header as row 1.
    #[error("row {row}: {message}")]
    Validation { row: usize, message: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<AesError>,
    },
}

impl AesError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        AesError::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AesError::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps the error with a location such as a file name or essay id.
    pub fn context(self, context: impl Into<String>) -> Self {
        AesError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Process exit code for the batch CLI: 2 for data and validation
    /// problems, 3 for everything the caller could not have fixed.
    pub fn exit_code(&self) -> i32 {
        match self {
            AesError::Context { source, .. } => source.exit_code(),
            AesError::Decode(_)
            | AesError::Validation { .. }
            | AesError::Parse { .. }
            | AesError::InvalidInput(_)
            | AesError::DimensionMismatch { .. }
            | AesError::Config(_)
            | AesError::Json(_) => 2,
            AesError::Io { source, .. } => match source.kind() {
                std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied => 2,
                _ => 3,
            },
        }
    }
}
