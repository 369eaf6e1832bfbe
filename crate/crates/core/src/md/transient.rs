//! Rough diffusivity from the decay of action-region temperature fluctuations.
//!
//! The difference `T_r - T_l` between the two action regions is dominated by
//! the leading antisymmetric microscale mode. Its fluctuations regress at that
//! mode's rate `σ = K k₃²`, so the e-folding lag of their autocorrelation,
//! averaged over independent seeds, gives `σ` and hence `K`.

use crate::error::{Error, Result};
use crate::md::Trajectory;
use crate::scalar::Real;
use crate::spectral::{diffusivity_from_decay, estimate_diffusivity};
use crate::stats::{autocorrelation, e_folding_lag};

/// Outcome of [`estimate_diffusivity_from_gap`].
#[derive(Clone, Debug)]
pub struct GapDecay<T> {
    /// Seed-averaged autocorrelation of the gap, lag spacing `dt`.
    pub acf: Vec<T>,
    pub dt: T,
    pub timescale: T,
    pub rate: T,
    /// `K` assuming `k₃h = 3π/2`.
    pub diffusivity: T,
}

impl<T: Real> GapDecay<T> {
    /// `K` for an explicitly known leading antisymmetric wavenumber.
    pub fn diffusivity_for(&self, k3: T) -> T {
        diffusivity_from_decay(self.rate, k3)
    }
}

/// Samples of `T_r - T_l` with `t >= t_skip`.
pub fn gap_series<T: Real>(traj: &Trajectory<T>, t_skip: T) -> Vec<T> {
    traj.records
        .iter()
        .filter(|r| r.t >= t_skip)
        .map(|r| r.aux.temps.right - r.aux.temps.left)
        .collect()
}

/// Averages the gap autocorrelation over `series` (one per seed, sampled every
/// `dt`) for lags below `max_lag`, and converts its e-folding lag to `K` for a
/// patch of half-width `h`.
pub fn estimate_diffusivity_from_gap<T: Real>(
    series: &[Vec<T>],
    dt: T,
    max_lag: T,
    h: T,
) -> Result<GapDecay<T>> {
    if series.is_empty() {
        return Err(Error::Analysis("no gap series supplied".into()));
    }
    if !(dt > T::zero()) || !(max_lag > dt) {
        return Err(Error::Analysis(format!("need 0 < dt < max_lag, got dt = {dt}, max_lag = {max_lag}")));
    }
    let lags = (max_lag / dt).round().to_usize().unwrap_or(0);
    let mut acf = vec![T::zero(); lags];
    for s in series {
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::Analysis("gap series contains non-finite samples".into()));
        }
        for (a, c) in acf.iter_mut().zip(autocorrelation(s, lags)?) {
            *a += c;
        }
    }
    let n = T::of_usize(series.len());
    acf.iter_mut().for_each(|a| *a /= n);
    let timescale = e_folding_lag(&acf, dt)?;
    let rate = timescale.recip();
    Ok(GapDecay { acf, dt, timescale, rate, diffusivity: rate * estimate_diffusivity(h) })
}
