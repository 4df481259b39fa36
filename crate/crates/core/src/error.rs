use thiserror::Error;

use crate::dft::FitFailure;

/// Errors raised by the simulation, measurement and analysis layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error(
        "histogram window [{start:.1}, {end:.1}] ps does not contain centroid {centroid:.1} ps \
         with a 4-sigma margin (sigma = {width:.1} ps)"
    )]
    WindowTooNarrow { start: f64, end: f64, centroid: f64, width: f64 },

    #[error("regression needs at least two distinct x values")]
    DegenerateRegression,

    #[error("calibration failed: only {survivors} usable points (need 3)")]
    CalibrationFailed { survivors: usize },

    #[error("gaussian fit failed: {0}")]
    Fit(#[from] FitFailure),

    #[error("{failed} of {cycles} measurement cycles failed to fit")]
    PersistentFitFailure { failed: usize, cycles: usize },

    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for errors caused by the caller's inputs (as opposed to a run that
    /// went wrong part-way).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::NonFinite(_)
                | Error::WindowTooNarrow { .. }
                | Error::DegenerateRegression
                | Error::Config(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(value: f64, what: &'static str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub(crate) fn ensure_positive(value: f64, name: &'static str) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn ensure_non_negative(value: f64, name: &'static str) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {value}")))
    }
}
