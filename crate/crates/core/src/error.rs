use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("smoothing parameter {eps} is not below tau = {tau}")]
    EpsilonTooLarge { eps: f64, tau: f64 },

    #[error("radial monotonicity violated at direction {direction:?}")]
    RadialMonotonicity { direction: Vec<f64> },

    #[error("norm not strictly convex: ascent runs disagree by {gap:e} rad")]
    NotStrictlyConvex { gap: f64 },

    #[error("conservation breach at t = {t}: {detail}; try a smaller step")]
    ConservationBreach { t: f64, detail: String },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("algebra has no matrix realization: {0}")]
    NoRealization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
