use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two points of a configuration coincide (correlation exactly one).
    #[error("duplicate points {0} and {1} in configuration")]
    DuplicatePoint(usize, usize),

    /// An iterative or adaptive method stopped before reaching its tolerance.
    #[error("numerical failure: {message} (best estimate {estimate:e}, error bound {error_bound:e})")]
    NumericalFailure {
        message: String,
        estimate: f64,
        error_bound: f64,
    },

    /// The law or configuration does not support the requested asymptotic branch.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// The quantity is undefined for these inputs (e.g. a ratio with vanishing denominator).
    #[error("undefined value: {0}")]
    Undefined(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// True for failures caused by numerics rather than invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NumericalFailure { .. } | Error::Undefined(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
