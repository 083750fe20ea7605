use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: {reason}")]
    Parse { row: usize, reason: String },

    #[error("input contains no points")]
    EmptyInput,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed complex: {0}")]
    MalformedComplex(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("complexes are not nested: {0}")]
    NotNested(String),

    #[error("invalid statistic spec: {0}")]
    InvalidSpec(String),

    #[error("need at least {need} points, got {got}")]
    InsufficientData { need: usize, got: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("pilot density vanishes at center {0}")]
    DegeneratePilot(usize),

    #[error("replicate {index}: {reason}")]
    Replicate { index: usize, reason: String },

    #[error("{what} needs at least {need} replicates, got {got}")]
    InsufficientReplicates {
        what: &'static str,
        need: usize,
        got: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
