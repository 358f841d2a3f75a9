use thiserror::Error;

/// Errors raised by the special-function, quadrature and pricing layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument outside the supported domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("{func}: argument {at} is within tolerance of a pole")]
    Pole { func: &'static str, at: String },

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("no truncation point below {limit} satisfies the spectral tail bound")]
    TailBoundFailure { limit: f64 },

    #[error("start {start} and target {target} match no hitting-time case")]
    Case { start: f64, target: f64 },

    #[error("near-coincident poles: {detail}")]
    PoleDegeneracy { detail: String },

    #[error("gap has no sign change on the fee bracket [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("{func}: produced a non-finite value")]
    NotFinite { func: &'static str },

    #[error("{func}: value {value} lies outside [0, 1] beyond tolerance")]
    OutOfRange { func: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn pole(func: &'static str, at: impl std::fmt::Display) -> Self {
        Error::Pole {
            func,
            at: at.to_string(),
        }
    }
}

/// Turns a NaN or infinite result into an explicit error.
pub(crate) fn finite(func: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NotFinite { func })
    }
}
