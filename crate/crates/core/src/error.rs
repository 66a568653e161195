use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration or inconsistent parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An adaptive or iterative method did not reach its tolerance.
    #[error("no convergence: {what} (best estimate {estimate:e}, error {error:e})")]
    NoConvergence {
        what: String,
        estimate: f64,
        error: f64,
    },

    /// A requested discretization exceeds the configured size limit.
    #[error("infeasible size: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
