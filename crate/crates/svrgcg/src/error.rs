use thiserror::Error;

/// Errors surfaced by the linear algebra kernels, oracles, solvers and the
/// benchmark harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative factorization ran out of sweeps before reaching its
    /// residual tolerance. The final residual is attached so callers can
    /// decide whether the result would have been usable.
    #[error("factorization did not converge within {sweeps} sweeps (residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("infeasible point: {0}")]
    Infeasible(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            expected: expected.into(),
            got: got.into(),
        }
    }
}
