use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the solver modules.
///
/// Variants split into two classes: *validation* errors (bad inputs caught
/// before any computation) and *numerical* errors (a solver hypothesis
/// failed mid-run). `is_validation` distinguishes them so callers can map
/// them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("parameter {name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error(
        "temperature ordering 0 < theta_ig < theta_hl < theta_plus violated \
         (theta_ig = {theta_ig}, theta_hl = {theta_hl}, theta_plus = {theta_plus})"
    )]
    OrderingViolated {
        theta_ig: f64,
        theta_hl: f64,
        theta_plus: f64,
    },

    #[error("u = {u} lies outside the reaction domain [{lo}, {hi}]")]
    OutOfDomain { u: f64, lo: f64, hi: f64 },

    #[error("front speed must be positive, got c = {c}")]
    SpeedNonPositive { c: f64 },

    #[error("speed must be non-negative, got c = {c}")]
    SpeedNegative { c: f64 },

    #[error("R = {r} lies outside the curve domain ({lo}, {hi}]")]
    OutOfRange { r: f64, lo: f64, hi: f64 },

    #[error("invalid custom reaction: {0}")]
    InvalidReaction(String),

    #[error("bracketing failed for {what}: {detail}")]
    BracketFailure { what: &'static str, detail: String },

    #[error("separatrix seed left the basin: v = {v} at u = {u} before reaching theta_hl")]
    SeedTooLarge { u: f64, v: f64 },

    #[error("integrator step size underflow at x = {x} (h = {h})")]
    ToleranceFailure { x: f64, h: f64 },

    #[error(
        "separatrix terminal point too far from the saddle for the tail estimate \
         (gap = {gap}, limit = {limit})"
    )]
    TailEstimateUnreliable { gap: f64, limit: f64 },

    #[error("psi - phi has no sign change on (0, R0]; solver hypotheses violated")]
    NoSignChange,

    #[error("time step dt = {dt} violates the stability bound dt <= dx^2/2 = {bound}")]
    StabilityViolated { dt: f64, bound: f64 },

    #[error("front reached the domain boundary (x_ig = {x_ig}, margin = {margin})")]
    FrontLeftDomain { x_ig: f64, margin: f64 },

    #[error("time series too short: {len} samples, window needs {needed}")]
    InsufficientData { len: usize, needed: usize },
}

impl Error {
    /// True for errors caught by input validation, false for numerical
    /// failures encountered during a run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveParameter { .. }
                | Error::NonFinite { .. }
                | Error::OrderingViolated { .. }
                | Error::OutOfDomain { .. }
                | Error::SpeedNonPositive { .. }
                | Error::SpeedNegative { .. }
                | Error::OutOfRange { .. }
                | Error::InvalidReaction(_)
                | Error::StabilityViolated { .. }
                | Error::InsufficientData { .. }
        )
    }
}
