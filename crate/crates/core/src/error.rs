use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    /// The min-norm-point iteration hit its cap. Carries the best iterate.
    #[error("min-norm point did not converge after {iterations} iterations (gap {gap:.3e}, distance {distance:.6e})")]
    NotConverged {
        iterations: usize,
        gap: f64,
        distance: f64,
        best: Vec<f64>,
    },

    #[error("outer hull unbounded")]
    Unbounded,

    #[error("no constraints survived")]
    NoConstraints,

    #[error("linear program failed: {0}")]
    LinearProgram(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. }
                | Error::Unbounded
                | Error::NoConstraints
                | Error::LinearProgram(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
