use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("point ({u}, {v}) lies on or outside the support boundary")]
    Boundary { u: f64, v: f64 },

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("overflow while evaluating {0}")]
    Overflow(&'static str),

    #[error("integral diverges: {0}")]
    Divergence(String),

    #[error("quadrature did not converge: value {value}, error estimate {error_estimate}")]
    Quadrature { value: f64, error_estimate: f64 },

    #[error("non-finite integrand value at x = {0}")]
    NonFinite(f64),

    #[error("root solver failed to converge after {0} iterations")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
