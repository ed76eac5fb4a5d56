use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied argument violates its precondition.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: String,
    },
    /// A model failed validation at construction time.
    #[error("invalid spectral model: {0}")]
    InvalidModel(String),
    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge on [{lo}, {hi}] (error estimate {error:e})")]
    Quadrature { lo: f64, hi: f64, error: f64 },
    /// Numerical calibration of a model constant failed.
    #[error("calibration failed: {0}")]
    Calibration(String),
    /// Conditional-CDF inversion in the sampler failed.
    #[error("inversion did not converge for model {model} at y = {y}, target = {target}")]
    Inversion { model: String, y: f64, target: f64 },
    /// A statistic or formula is undefined for the given input (for example 0/0).
    #[error("degenerate: {0}")]
    Degenerate(String),
    /// The ratio X/Y is bounded, so no norming sequence exists.
    #[error("ratio is bounded by {0}; gamma vanishes eventually and no norming sequence exists")]
    BoundedRatio(f64),
    /// No observation exceeds the requested threshold.
    #[error("no exceedances of threshold {0}")]
    NoExceedances(f64),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: impl ToString, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. } | Error::InvalidModel(_))
    }
}
