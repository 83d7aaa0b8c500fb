//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coordinate {coordinate} has tied values (rows {row_a} and {row_b}); enable jitter or deduplicate")]
    TiesDetected { coordinate: usize, row_a: usize, row_b: usize },

    #[error("non-finite value at row {row}, coordinate {coordinate}")]
    NonFiniteValue { row: usize, coordinate: usize },

    #[error("too few points: {remaining} remain after trimming coordinate {coordinate}, need at least 1")]
    TooFewPoints { coordinate: usize, remaining: usize },

    #[error("invalid Beta shape parameters a={a}, b={b}; both must be positive and finite")]
    InvalidShape { a: f64, b: f64 },

    #[error("no convergence in {op} after {iterations} iterations")]
    NoConvergence { op: &'static str, iterations: usize },

    #[error("density bound requested for an unbounded rectangle")]
    UnboundedRect,

    #[error("no bounded rectangle passes the goodness-of-fit test; the histogram is empty")]
    EmptyBetaTree,

    #[error("bins {from} and {to} are not connected in the adjacency graph")]
    Disconnected { from: usize, to: usize },

    #[error("covariance matrix of component {component} is not positive definite")]
    NotPositiveDefinite { component: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-parsable class name, one token per variant.
    pub fn class(&self) -> &'static str {
        match self {
            Error::TiesDetected { .. } => "TiesDetected",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::InvalidShape { .. } => "InvalidShape",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::UnboundedRect => "UnboundedRect",
            Error::EmptyBetaTree => "EmptyBetaTree",
            Error::Disconnected { .. } => "Disconnected",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
