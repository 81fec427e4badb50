use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed diagram: {0}")]
    Structure(String),
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("unknown skeleton label {0:?}")]
    UnknownLabel(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degree {requested} exceeds the configured cutoff {cutoff}")]
    DegreeCutoff { requested: usize, cutoff: usize },
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
