use crate::continuum::{resolve_dt, GridField};
use crate::error::{config_err, Result};
use crate::ode::{run_fixed_step, OdeSystem};
use crate::scalar::Real;

/// Heat equation `T_t = K T_xx` on `[-H, H]` with Dirichlet ends.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatConfig<T> {
    pub diffusivity: T,
    pub big_h: T,
    /// Number of grid intervals.
    pub n: usize,
    pub dt: Option<T>,
    pub t_end: T,
    pub output_interval: T,
}

impl<T: Real> HeatConfig<T> {
    pub fn dx(&self) -> T {
        (self.big_h + self.big_h) / T::of_usize(self.n)
    }

    pub fn nodes(&self) -> Vec<T> {
        let dx = self.dx();
        (0..=self.n).map(|i| -self.big_h + T::of_usize(i) * dx).collect()
    }
}

struct Heat<'a, T, L, R> {
    k_dx2: T,
    left: &'a L,
    right: &'a R,
}

impl<T: Real, L: Fn(T) -> T, R: Fn(T) -> T> OdeSystem<T> for Heat<'_, T, L, R> {
    fn dim(&self) -> usize {
        0
    }

    // interior nodes only; the ends come from the boundary functions
    fn rhs(&mut self, t: T, y: &[T], d: &mut [T]) -> Result<()> {
        let m = y.len();
        let two = T::of(2.0);
        for i in 0..m {
            let l = if i == 0 { (self.left)(t) } else { y[i - 1] };
            let r = if i + 1 == m { (self.right)(t) } else { y[i + 1] };
            d[i] = self.k_dx2 * (l - two * y[i] + r);
        }
        Ok(())
    }
}

/// Second-order method-of-lines solution of the heat equation; returns the
/// field (including boundary nodes) at every output time.
pub fn solve_heat_reference<T: Real>(
    cfg: &HeatConfig<T>,
    t_left: impl Fn(T) -> T,
    t_right: impl Fn(T) -> T,
    ic: impl Fn(T) -> T,
) -> Result<Vec<GridField<T>>> {
    if cfg.n < 2 {
        return config_err("heat reference needs at least two intervals");
    }
    if !(cfg.diffusivity > T::zero() && cfg.big_h > T::zero() && cfg.t_end > T::zero()) {
        return config_err("diffusivity, domain half-width and end time must be positive");
    }
    let dx = cfg.dx();
    let dt = resolve_dt(cfg.dt, dx, cfg.diffusivity)?;
    let x = cfg.nodes();
    let tol = T::of(1e-8) * (T::one() + ic(x[0]).abs() + ic(x[cfg.n]).abs());
    if (ic(x[0]) - t_left(T::zero())).abs() > tol || (ic(x[cfg.n]) - t_right(T::zero())).abs() > tol {
        return config_err("initial condition does not match the boundary values");
    }
    let mut y: Vec<T> = x[1..cfg.n].iter().map(|&xi| ic(xi)).collect();
    let mut sys = Heat { k_dx2: cfg.diffusivity / (dx * dx), left: &t_left, right: &t_right };
    let mut out = Vec::new();
    run_fixed_step(&mut sys, &mut y, cfg.t_end, dt, cfg.output_interval, |t, y| {
        let mut values = Vec::with_capacity(cfg.n + 1);
        values.push(t_left(t));
        values.extend_from_slice(y);
        values.push(t_right(t));
        out.push(GridField { x: x.clone(), values, dx, t });
        Ok(true)
    })?;
    Ok(out)
}
