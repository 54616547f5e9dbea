use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ODE solver failed at t = {t}: {reason}")]
    SolverFailure { t: f64, reason: String },

    /// `Im(ε*·ε̇)` is not 1, so the pair is not a valid trajectory point.
    #[error("invalid trajectory point: Im(eps* deps) = {wronskian} (expected 1)")]
    WronskianViolation { wronskian: f64 },

    #[error("odd cat state with zero amplitude has no normalization")]
    NormalizationDivergence,

    #[error("degenerate tomogram frame (mu, nu) = ({mu}, {nu})")]
    DegenerateFrame { mu: f64, nu: f64 },

    #[error("filtered backprojection needs at least {required} angles, got {got}")]
    InsufficientAngles { got: usize, required: usize },

    #[error("reconstruction normalization {normalization} deviates from 1 by more than {tolerance}")]
    ReconstructionQuality { normalization: f64, tolerance: f64 },

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
