use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates the precondition of the operation.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The parameters sit on a pole of the formula.
    #[error("singular parameters: {condition}")]
    SingularParameter { condition: &'static str },

    /// The redundant expressions evaluated at `sigma` disagree, so `sigma`
    /// is not a root of the resonance equation it was claimed to solve.
    #[error("sigma = {sigma} is not a resonance root (relative spread {spread:e})")]
    NotARoot { sigma: f64, spread: f64 },

    #[error("root search in [{lo}, {hi}] did not converge")]
    NoConvergence { lo: f64, hi: f64 },

    #[error("width {l} is below the precision floor {floor}")]
    BelowPrecisionFloor { l: f64, floor: f64 },

    /// A computed quantity broke one of its defining identities.
    #[error("invariant violated: {what} (residual {residual:e})")]
    InvariantViolation { what: &'static str, residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Rejects non-finite values.
pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite, got {value}")))
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if finite(name, value)? > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be > 0, got {value}")))
    }
}
