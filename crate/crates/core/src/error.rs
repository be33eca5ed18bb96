use std::ops::Range;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A bracketed span that looks like a citation but does not fit the marker grammar.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed citation marker {fragment:?} at bytes {}..{}: {reason}", span.start, span.end)]
pub struct MarkerError {
    pub span: Range<usize>,
    pub fragment: String,
    pub reason: String,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Marker(#[from] MarkerError),

    #[error("record {record}: {message}")]
    Schema { record: usize, message: String },

    #[error("invalid cleaned label {0:?} (expected zero, one, multi or invalid)")]
    InvalidLabel(String),

    #[error("{0}")]
    Precondition(String),

    #[error("non-finite value in feature {index}")]
    NonFiniteFeature { index: usize },

    #[error("embedding dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("embedding service unavailable: {0}")]
    EmbeddingUnavailable(String),

    #[error("embedding service returned an invalid response: {0}")]
    EmbeddingResponse(String),

    #[error("unsupported model file: {0}")]
    ModelFormat(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors worth retrying later (a remote embedding service that timed out
    /// or refused the connection). Everything else is fatal.
    pub fn is_retriable(&self) -> bool {
        matches!(self, Error::EmbeddingUnavailable(_))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
