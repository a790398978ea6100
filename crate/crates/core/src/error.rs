use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("hilbert dimension {dim} exceeds the configured guard ({limit})")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("operator is not hermitian (max |H - H^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("state vector has zero norm")]
    ZeroState,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "integration failed at t = {t}: phase-space copies diverged by {divergence:e} \
         (bound {bound:e}); reduce dt or increase omega_binding"
    )]
    StepFailure { t: f64, divergence: f64, bound: f64 },

    #[error("no trajectory samples in window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("elbow fit needs at least 4 points with 2 distinct heights, got {0}")]
    TooFewPoints(usize),

    /// `origin` is `line N`, `override`, or `default` for a key never set.
    #[error("config error ({origin}), key `{key}`: {reason}")]
    Config { key: String, origin: String, reason: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepFailure { .. } | Error::ZeroState | Error::NotHermitian { .. } | Error::EmptyWindow { .. }
        )
    }
}
