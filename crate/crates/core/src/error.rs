use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("{0} must be nonempty")]
    EmptySet(&'static str),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what}: size {size} exceeds the exhaustive limit {max}; {hint}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        max: usize,
        hint: &'static str,
    },

    #[error("resource budget exhausted in {what}: {detail}")]
    Resource { what: &'static str, detail: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A property that a hypothesis chain promises failed on a concrete instance.
    #[error("{lemma} falsified: {detail}")]
    Falsified { lemma: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
