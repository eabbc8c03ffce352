use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter vector lies outside `Λ` (some coordinate below `λ^min`).
    #[error("parameter coordinate {index} is {value}, below the lower bound {min}")]
    DomainViolation { index: usize, value: String, min: String },

    #[error("weight component {index} is negative")]
    NegativeWeight { index: usize },

    #[error("epsilon must lie in (0, 1), got {0}")]
    EpsilonOutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    #[error("grid has {size} points, above the cap of {cap}")]
    GridTooLarge { size: String, cap: u64 },

    #[error("oracle failed at lambda = ({lambda}): {message}")]
    OracleFailure { lambda: String, message: String },

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code shared by the CLI and the C ABI status codes.
    pub fn code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::Json(_) => 2,
            Error::EpsilonOutOfRange(_) => 3,
            Error::GridTooLarge { .. } => 4,
            Error::DomainViolation { .. } => 5,
            _ => 1,
        }
    }
}
