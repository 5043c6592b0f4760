use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex {vertex} out of range 1..={n} on line {line}")]
    VertexOutOfRange { vertex: usize, n: usize, line: usize },

    #[error("duplicate edge {{{u},{v}}} on line {line}")]
    DuplicateEdge { u: usize, v: usize, line: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("rank precondition violated: {0}")]
    RankPrecondition(String),

    #[error("genericity failure after {retries} retries: {what}")]
    Genericity { retries: usize, what: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("certificate search exhausted {tries} tries")]
    RetriesExhausted { tries: usize },

    #[error("pattern mismatch: {0}")]
    PatternMismatch(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
