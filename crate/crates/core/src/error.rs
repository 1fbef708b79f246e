use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree parameter k must be at least 2, got {0}")]
    InvalidDegree(usize),

    #[error("parameter (0, 0) has no representative on the unit sphere")]
    ZeroParameter,

    #[error("point is not a singular point (|P(z)| = {residual:e})")]
    NotSingular { residual: f64 },

    #[error("singular point is parabolic (multiplicity > 1)")]
    Parabolic,

    #[error("parameter lies in the parabolic guard band (|discriminant| = {discriminant:e})")]
    NearParabolic { discriminant: f64 },

    #[error("singular point is not parabolic")]
    NotParabolic,

    #[error("field evaluated at the pole w = 0")]
    PoleEvaluation,

    #[error("integration step collapsed to {step:e} at z = {re} + {im}i")]
    StepUnderflow { step: f64, re: f64, im: f64 },

    #[error("trajectory start coincides with singular point {index}")]
    StartAtSingularPoint { index: usize },

    #[error("inconsistent periodic/escaping classification on ray {ray}")]
    BisectionStall { ray: usize },

    #[error("chord test requires a planar periodgon")]
    NonPlanar,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
