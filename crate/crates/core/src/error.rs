use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("query is empty after tokenization")]
    EmptyQuery,
    #[error("query is {0} characters long, the limit is {max}", max = crate::text::MAX_QUERY_CHARS)]
    QueryTooLong(usize),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("taxonomy error: {0}")]
    Taxonomy(String),
    #[error("overlapping entity spans at tokens {0:?} and {1:?}")]
    Overlap((usize, usize), (usize, usize)),
    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },
    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Divergence { epoch: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("length mismatch: {0} predictions vs {1} gold labels")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} samples per side, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("unsupported bundle version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("corrupt bundle: {0}")]
    CorruptFile(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
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
