use thiserror::Error;

use crate::advection::WavefieldSnapshot;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("continuation step too large for this grid (max exponent {exponent:.3} > {limit})")]
    ContinuationOverflow { exponent: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {arg} exceeds the representable range of {function}")]
    Overflow { function: &'static str, arg: f64 },

    #[error("evaluation of {function} failed at {at}")]
    Evaluation { function: String, at: String },

    #[error("quadrature did not converge (estimate {estimate:e}, error {error:e})")]
    NotConverged { estimate: f64, error: f64 },

    #[error("simulation diverged at t={t:.6} s")]
    Diverged {
        t: f64,
        last_finite: Box<WavefieldSnapshot>,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
