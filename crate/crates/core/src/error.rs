use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("self-consistent iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("pole in `{coefficient}` at delta = {delta:e} rad/s")]
    Pole { coefficient: &'static str, delta: f64 },

    #[error("branch is not a steady state (residual {residual:e})")]
    NotSteady { residual: f64 },

    #[error("eigenvalue solver failed: {0}")]
    Numerical(String),

    #[error("trajectory diverged at t = {time:e} s (state norm {norm:e})")]
    Instability { time: f64, norm: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("scan contains no finite points")]
    EmptyScan,

    #[error("no splitting: found {maxima} local maxima, need 2")]
    NoSplitting { maxima: usize },

    #[error("calibration fit failed: {0}")]
    Fit(String),

    #[error("calibration slope {slope:e} is too small to invert")]
    InsensitiveCalibration { slope: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that come from the numerics rather than from user input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidParameter { .. } | Error::Config { .. })
    }
}
