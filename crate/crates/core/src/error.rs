use thiserror::Error;

/// Errors raised across the testbed.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate input: all vectors are numerically zero")]
    DegenerateInput,

    #[error("subspaces overlap: numerical rank {rank} < {expected}")]
    OverlapDetected { rank: usize, expected: usize },

    #[error("rank deficient: numerical rank {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("empty list")]
    EmptyList,

    #[error("cannot sample from a zero-dimensional space")]
    ZeroDimensional,

    #[error("vector is not unit length (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state of {required_bits} bits exceeds the budget of {capacity_bits} bits")]
    BudgetViolation {
        capacity_bits: usize,
        required_bits: usize,
    },

    #[error("malformed state: {0}")]
    MalformedState(String),

    #[error(
        "conditioning event too rare: {attempts} attempts, exact acceptance probability {acceptance_probability:.3e}"
    )]
    AcceptanceTooRare {
        attempts: usize,
        acceptance_probability: f64,
    },

    #[error("no separator of the stored sample found within {passes} perceptron passes")]
    NotSeparableInProjection { passes: usize },

    #[error("inner solver output has norm {norm:.3e} below the floor {floor:.3e}")]
    DegenerateOutput { norm: f64, floor: f64 },

    #[error("algorithm `{algorithm}` cannot run on a `{instance}` instance")]
    IncompatibleInstance { algorithm: String, instance: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
