//! Explicit Runge-Kutta steppers over flat state vectors.
//!
//! The fixed-step RK4 is the default for every simulator in the crate; the
//! embedded Bogacki-Shampine 3(2) pair is available for the atomistic patch.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A first-order system `dy/dt = f(t, y)`.
///
/// Takes `&mut self` so implementations can keep scratch buffers and
/// per-evaluation bookkeeping.
pub trait OdeSystem<T: Real> {
    fn dim(&self) -> usize;
    fn rhs(&mut self, t: T, y: &[T], dydt: &mut [T]) -> Result<()>;
}

/// Classic fourth-order Runge-Kutta with preallocated stages.
#[derive(Debug, Clone)]
pub struct Rk4<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    tmp: Vec<T>,
}

impl<T: Real> Rk4<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![T::zero(); dim],
            k2: vec![T::zero(); dim],
            k3: vec![T::zero(); dim],
            k4: vec![T::zero(); dim],
            tmp: vec![T::zero(); dim],
        }
    }

    /// Advances `y` from `t` to `t + dt` in place.
    pub fn step<S: OdeSystem<T> + ?Sized>(
        &mut self,
        sys: &mut S,
        t: T,
        dt: T,
        y: &mut [T],
    ) -> Result<()> {
        let half = dt / T::of(2.0);
        sys.rhs(t, y, &mut self.k1)?;
        for ((tmp, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *tmp = yi + half * k;
        }
        sys.rhs(t + half, &self.tmp, &mut self.k2)?;
        for ((tmp, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *tmp = yi + half * k;
        }
        sys.rhs(t + half, &self.tmp, &mut self.k3)?;
        for ((tmp, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *tmp = yi + dt * k;
        }
        sys.rhs(t + dt, &self.tmp, &mut self.k4)?;
        let sixth = dt / T::of(6.0);
        let two = T::of(2.0);
        for i in 0..y.len() {
            y[i] += sixth * (self.k1[i] + two * (self.k2[i] + self.k3[i]) + self.k4[i]);
        }
        Ok(())
    }
}

/// Integrates `sys` from `0` to `t_end` with RK4, shrinking `dt` slightly so a
/// whole number of steps lands on `t_end`. `on_output` sees `(t, y)` at `t = 0`,
/// every `output_every` steps and at the end; returning `false` stops early.
/// Returns the final time reached.
pub fn run_fixed_step<T: Real, S: OdeSystem<T> + ?Sized>(
    sys: &mut S,
    y: &mut [T],
    t_end: T,
    dt: T,
    output_interval: T,
    mut on_output: impl FnMut(T, &[T]) -> Result<bool>,
) -> Result<T> {
    let steps = (t_end / dt - T::of(1e-9)).ceil().to_usize().unwrap_or(1).max(1);
    let dt = t_end / T::of_usize(steps);
    let every = (output_interval / dt).round().to_usize().unwrap_or(1).max(1);
    let mut rk = Rk4::new(y.len());
    if !on_output(T::zero(), y)? {
        return Ok(T::zero());
    }
    for s in 0..steps {
        rk.step(sys, T::of_usize(s) * dt, dt, y)?;
        if (s + 1) % every == 0 || s + 1 == steps {
            let t = T::of_usize(s + 1) * dt;
            if !on_output(t, y)? {
                return Ok(t);
            }
        }
    }
    Ok(t_end)
}

/// Tolerances for the adaptive pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub rtol: T,
    pub atol: T,
}

/// Bogacki-Shampine 3(2) embedded pair with FSAL reuse.
#[derive(Debug, Clone)]
pub struct BogackiShampine<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    tmp: Vec<T>,
    fsal_valid: bool,
    pub tol: Tolerance<T>,
    pub min_step: T,
}

/// Outcome of one adaptive attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveStep<T> {
    pub accepted: bool,
    /// Step actually taken (when accepted) or attempted.
    pub taken: T,
    /// Suggested next step.
    pub next: T,
}

impl<T: Real> BogackiShampine<T> {
    pub fn new(dim: usize, tol: Tolerance<T>) -> Self {
        Self {
            k1: vec![T::zero(); dim],
            k2: vec![T::zero(); dim],
            k3: vec![T::zero(); dim],
            k4: vec![T::zero(); dim],
            tmp: vec![T::zero(); dim],
            fsal_valid: false,
            tol,
            min_step: T::of(1e-12),
        }
    }

    /// Forget the cached first stage (call after `y` is modified externally).
    pub fn reset(&mut self) {
        self.fsal_valid = false;
    }

    /// Attempts a step of size `dt`; on acceptance `y` is advanced.
    pub fn try_step<S: OdeSystem<T> + ?Sized>(
        &mut self,
        sys: &mut S,
        t: T,
        dt: T,
        y: &mut [T],
    ) -> Result<AdaptiveStep<T>> {
        if dt < self.min_step {
            return Err(Error::StepUnderflow {
                t: t.to_f64_lossy(),
                step: dt.to_f64_lossy(),
            });
        }
        let c = |v: f64| T::of(v);
        if !self.fsal_valid {
            sys.rhs(t, y, &mut self.k1)?;
            self.fsal_valid = true;
        }
        for i in 0..y.len() {
            self.tmp[i] = y[i] + dt * c(0.5) * self.k1[i];
        }
        sys.rhs(t + dt * c(0.5), &self.tmp, &mut self.k2)?;
        for i in 0..y.len() {
            self.tmp[i] = y[i] + dt * c(0.75) * self.k2[i];
        }
        sys.rhs(t + dt * c(0.75), &self.tmp, &mut self.k3)?;
        let (b1, b2, b3) = (c(2.0 / 9.0), c(1.0 / 3.0), c(4.0 / 9.0));
        for i in 0..y.len() {
            self.tmp[i] = y[i] + dt * (b1 * self.k1[i] + b2 * self.k2[i] + b3 * self.k3[i]);
        }
        sys.rhs(t + dt, &self.tmp, &mut self.k4)?;
        // error = y3 - y2 with the embedded second-order weights
        let (e1, e2, e3, e4) = (
            c(2.0 / 9.0 - 7.0 / 24.0),
            c(1.0 / 3.0 - 0.25),
            c(4.0 / 9.0 - 1.0 / 3.0),
            c(-0.125),
        );
        let mut err = T::zero();
        for i in 0..y.len() {
            let e = dt * (e1 * self.k1[i] + e2 * self.k2[i] + e3 * self.k3[i] + e4 * self.k4[i]);
            let scale = self.tol.atol + self.tol.rtol * y[i].abs().max(self.tmp[i].abs());
            let r = e / scale;
            err += r * r;
        }
        let err = (err / T::of_usize(y.len().max(1))).sqrt();
        if !err.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite error estimate at t = {t}"
            )));
        }
        let factor = if err == T::zero() {
            c(5.0)
        } else {
            (c(0.9) * err.powf(c(-1.0 / 3.0))).min(c(5.0)).max(c(0.2))
        };
        if err <= T::one() {
            y.copy_from_slice(&self.tmp);
            std::mem::swap(&mut self.k1, &mut self.k4);
            Ok(AdaptiveStep { accepted: true, taken: dt, next: dt * factor })
        } else {
            Ok(AdaptiveStep { accepted: false, taken: dt, next: dt * factor })
        }
    }
}
