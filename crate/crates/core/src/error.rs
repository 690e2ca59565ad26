use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Bose factor requested at zero frequency; use the limit branch of the rate instead.
    #[error("Bose occupation is singular at omega = 0")]
    ZeroFrequency,

    #[error("negative dissipation rate {0}")]
    NegativeRate(f64),

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Stationary state is not unique; `dim` is the measured nullspace dimension.
    #[error("degenerate steady state: nullspace dimension {dim}")]
    DegenerateSteadyState { dim: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("Fourier cutoff cap {cap} reached without convergence (relative changes {history:?})")]
    CutoffNotConverged { cap: usize, history: Vec<f64> },

    #[error("{backend} does not support this point: {reason}")]
    Unsupported { backend: &'static str, reason: String },

    #[error("unknown backend `{0}`")]
    UnknownBackend(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
