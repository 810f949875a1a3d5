use thiserror::Error;

/// Which trivial set a degenerate per-class restriction collapses to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// The membership condition holds for every point.
    Universe,
    /// The membership condition holds for no point.
    Empty,
}

impl std::fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Degeneracy::Universe => write!(f, "the whole space"),
            Degeneracy::Empty => write!(f, "the empty set"),
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum TsvmError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("half-space for class {class} is degenerate: it is {kind}")]
    DegenerateHalfspace { class: usize, kind: Degeneracy },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },

    #[error("no supporting half-space with positive margin exists")]
    NoPositiveMargin,

    #[error("the two classes are not linearly separable; common point {witness:?}")]
    NotSeparable { witness: Vec<f64> },

    #[error("class hulls share a common point, hard-margin training is impossible: {reason}")]
    NotTrainable {
        reason: String,
        witness: Option<Vec<f64>>,
    },

    #[error("unsupported dimension: expected {expected}, got {got}")]
    UnsupportedDimension { expected: usize, got: usize },

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("instance generation failed: {0}")]
    GenerationFailure(String),
}

pub type Result<T, E = TsvmError> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(TsvmError::InvalidArgument(msg.into()))
}
