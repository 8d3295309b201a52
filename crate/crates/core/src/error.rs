use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("breakpoint index {index} out of range (drift has {count} breakpoints)")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("transform scheme requires σ(ζ) ≠ 0 at every breakpoint, but σ({breakpoint}) = 0")]
    DegenerateDiffusion { breakpoint: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("grid is not a refinement: {0}")]
    NotARefinement(String),

    #[error("inverse transform did not converge for z = {z} after {iterations} iterations")]
    InversionFailed { z: f64, iterations: usize },

    #[error("transformed drift is discontinuous at breakpoint {breakpoint}: one-sided gap {gap:e}")]
    ContinuityViolation { breakpoint: f64, gap: f64 },

    #[error("adaptive step underflow at t = {time}: h = {step:e}")]
    StepUnderflow { time: f64, step: f64 },

    #[error("no reference solution available: {0}")]
    ReferenceUnavailable(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    /// True for failures raised by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InversionFailed { .. }
                | Error::ContinuityViolation { .. }
                | Error::StepUnderflow { .. }
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
