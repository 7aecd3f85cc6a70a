use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid stick parameters: {0}")]
    InvalidParams(&'static str),

    #[error("invalid juggling spec: {0}")]
    InvalidSpec(&'static str),

    #[error("application offset r = {offset} outside [0, {max}]")]
    OffsetOutOfRange { offset: f64, max: f64 },

    #[error("degenerate section: sin(beta*) = {sin_beta} is not positive")]
    DegenerateSection { sin_beta: f64 },

    #[error(
        "post-impulse beta rate {beta_dot} is not negative; the stick does not leave the section"
    )]
    NonDescendingPostImpulse { beta_dot: f64 },

    #[error("grazing flight: post-impulse beta rate {beta_dot} is too close to zero")]
    GrazingFlight { beta_dot: f64 },

    #[error("flight time {delta} s is below the minimum {delta_min} s (offset would exceed half length)")]
    InfeasibleFlightTime { delta: f64, delta_min: f64 },

    #[error("fixed-point residual {residual} is too large to linearize about")]
    FixedPointDrift { residual: f64 },

    #[error("Riccati iteration did not converge in {iterations} iterations")]
    RiccatiDivergence { iterations: usize },

    #[error("closed loop is not stable: spectral radius {spectral_radius}")]
    NotStabilizable { spectral_radius: f64 },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),

    #[error("no ascending crossing of the section within {horizon} s")]
    NoSectionCrossing { horizon: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(&'static str),
}
