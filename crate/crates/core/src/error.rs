use thiserror::Error;

use crate::geometry::Region;

/// Errors raised by the simulators and analyses.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A quantity became non-finite, or an integration could not proceed.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Controlled run found no atoms in a region whose temperature it needs.
    #[error("region {region:?} is empty at t = {t}")]
    RegionEmpty { region: Region, t: f64 },

    /// Adaptive integration could not satisfy the tolerance.
    #[error("step size underflow at t = {t} (h = {step:e})")]
    StepUnderflow { t: f64, step: f64 },

    /// Root bracketing ran out of search interval before finding the requested roots.
    #[error("analysis error: {0}")]
    Analysis(String),

    /// Slow-manifold linear system is rank deficient.
    #[error("slow-manifold construction failed: {reason} (condition number {condition:e})")]
    Construction { reason: String, condition: f64 },

    /// Run stopped by an observer (wall-clock guard, user abort).
    #[error("run aborted at t = {t}: {reason}")]
    Aborted { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
