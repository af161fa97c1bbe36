use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A query at a point where the requested object does not exist
    /// (e.g. a Jacobian at a point of non-differentiability).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration: bad ladders, sample counts, scenario files.
    #[error("config error: {0}")]
    Config(String),

    /// The Newton iteration did not reach the residual target. This signals
    /// a parameter outside the neighborhood on which a solution branch is
    /// guaranteed, not a soundness violation.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        /// Residual per iteration, for diagnostics.
        trace: Vec<f64>,
    },

    /// A monomial exponent exceeded the fixed overflow guard.
    #[error("monomial exponent overflow: {var}^{exponent} exceeds the bound {max}")]
    ExponentOverflow {
        var: &'static str,
        exponent: u32,
        max: u32,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
