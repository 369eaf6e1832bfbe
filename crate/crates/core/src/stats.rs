//! Small statistics helpers for post-processing trajectories.

use crate::error::{Error, Result};
use crate::scalar::Real;

fn analysis(msg: impl Into<String>) -> Error {
    Error::Analysis(msg.into())
}

pub fn mean<T: Real>(xs: &[T]) -> Result<T> {
    if xs.is_empty() {
        return Err(analysis("mean of an empty sample"));
    }
    Ok(xs.iter().copied().sum::<T>() / T::of_usize(xs.len()))
}

/// Sample mean of the values whose time lies in the closed window `[t0, t1]`.
pub fn window_mean<T: Real>(times: &[T], values: &[T], t0: T, t1: T) -> Result<T> {
    if times.len() != values.len() {
        return Err(analysis("times and values differ in length"));
    }
    let picked: Vec<T> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= t0 && **t <= t1)
        .map(|(_, v)| *v)
        .collect();
    if picked.is_empty() {
        return Err(analysis(format!("no samples in window [{t0}, {t1}]")));
    }
    mean(&picked)
}

/// Least-squares line `y = slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
}

pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> Result<LineFit<T>> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(analysis("linear fit needs at least two paired points"));
    }
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= T::zero() {
        return Err(analysis("linear fit with all abscissae equal"));
    }
    let slope = sxy / sxx;
    Ok(LineFit { slope, intercept: my - slope * mx })
}

/// Normalised autocorrelation of `xs` about its mean for lags `0..max_lag`.
///
/// Each lag is averaged over its own number of overlapping pairs, so entry 0
/// is exactly one.
pub fn autocorrelation<T: Real>(xs: &[T], max_lag: usize) -> Result<Vec<T>> {
    if max_lag == 0 || max_lag >= xs.len() {
        return Err(analysis(format!(
            "autocorrelation needs 0 < max_lag < {} samples",
            xs.len()
        )));
    }
    let m = mean(xs)?;
    let dev: Vec<T> = xs.iter().map(|&x| x - m).collect();
    let mut out = Vec::with_capacity(max_lag);
    for lag in 0..max_lag {
        let pairs = dev.len() - lag;
        let s: T = dev[..pairs].iter().zip(&dev[lag..]).map(|(a, b)| *a * *b).sum();
        out.push(s / T::of_usize(pairs));
    }
    let c0 = out[0];
    if c0 <= T::zero() {
        return Err(analysis("constant series has no autocorrelation"));
    }
    Ok(out.into_iter().map(|c| c / c0).collect())
}

/// Lag at which a decreasing correlation first falls below `1/e`, linearly
/// interpolated between samples spaced `dt` apart.
pub fn e_folding_lag<T: Real>(acf: &[T], dt: T) -> Result<T> {
    let level = T::one() / T::one().exp();
    for i in 1..acf.len() {
        if acf[i] < level {
            let (a, b) = (acf[i - 1], acf[i]);
            return Ok(dt * (T::of_usize(i - 1) + (a - level) / (a - b)));
        }
    }
    Err(analysis("correlation never decays below 1/e within the lag range"))
}
