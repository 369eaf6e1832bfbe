use crate::continuum::{ControlledPdeConfig, GridField};
use crate::coupling::targets_from_core;
use crate::error::{config_err, Error, Result};
use crate::geometry::Region;
use crate::ode::{run_fixed_step, OdeSystem};
use crate::scalar::{sq, Real};

/// Closed-form steady state of the controlled patch for constant wall
/// temperatures, periodic on `[-h, h]`.
pub fn equilibrium_profile<T: Real>(x: T, mu: T, t_left: T, t_right: T, h: T, big_h: T) -> T {
    let t0 = (t_left + t_right) / T::of(2.0);
    let dt = (t_right - t_left) * (h / (T::of(4.0) * big_h)) / (T::one() + mu / T::of(12.0));
    let amp = mu * dt;
    let ax = x.abs();
    let s = x.signum();
    if ax < h / T::of(4.0) {
        t0 + amp / T::of(4.0) * x / h
    } else if ax < T::of(0.75) * h {
        t0 + amp / T::of(16.0) * (T::of(1.5) - T::of(2.0) * sq(T::of(2.0) * ax / h - T::one())) * s
    } else {
        t0 + amp / T::of(4.0) * (s - x / h)
    }
}

/// Region of every cell and the cell counts of core, left and right.
pub(crate) struct RegionMap {
    pub region: Vec<Region>,
    pub counts: [usize; 3],
}

impl RegionMap {
    pub fn new<T: Real>(cfg: &ControlledPdeConfig<T>) -> Self {
        let region: Vec<Region> = cfg.cell_centres().into_iter().map(|x| cfg.geometry.classify(x)).collect();
        let count = |r| region.iter().filter(|&&q| q == r).count();
        let counts = [count(Region::Core), count(Region::LeftAction), count(Region::RightAction)];
        Self { region, counts }
    }

    /// Midpoint-rule averages over the core, left and right action regions.
    pub fn averages<T: Real>(&self, u: &[T]) -> [T; 3] {
        let mut s = [T::zero(); 3];
        for (v, r) in u.iter().zip(&self.region) {
            match r {
                Region::Core => s[0] += *v,
                Region::LeftAction => s[1] += *v,
                Region::RightAction => s[2] += *v,
                Region::Buffer => {}
            }
        }
        [
            s[0] / T::of_usize(self.counts[0]),
            s[1] / T::of_usize(self.counts[1]),
            s[2] / T::of_usize(self.counts[2]),
        ]
    }
}

/// Periodic second difference scaled by `K/dx²`, written into `d`.
pub(crate) fn periodic_diffusion<T: Real>(u: &[T], k_dx2: T, d: &mut [T]) {
    let n = u.len();
    let two = T::of(2.0);
    for i in 0..n {
        let l = u[(i + n - 1) % n];
        let r = u[(i + 1) % n];
        d[i] = k_dx2 * (l - two * u[i] + r);
    }
}

struct ControlledPatch<'a, T, L, R> {
    cfg: &'a ControlledPdeConfig<T>,
    map: RegionMap,
    k_dx2: T,
    gain: T,
    left: &'a L,
    right: &'a R,
}

impl<T: Real, L: Fn(T) -> T, R: Fn(T) -> T> OdeSystem<T> for ControlledPatch<'_, T, L, R> {
    fn dim(&self) -> usize {
        self.cfg.n
    }

    fn rhs(&mut self, t: T, u: &[T], d: &mut [T]) -> Result<()> {
        periodic_diffusion(u, self.k_dx2, d);
        if self.gain == T::zero() {
            return Ok(());
        }
        let [core, left, right] = self.map.averages(u);
        if !core.is_finite() {
            return Err(Error::Numeric(format!("core average not finite at t = {t}")));
        }
        let h = self.cfg.geometry.half_width();
        let targets = targets_from_core(core, (self.left)(t), (self.right)(t), h, self.cfg.geometry.macro_length());
        let g_minus = self.gain * (targets.minus - left);
        let g_plus = self.gain * (targets.plus - right);
        for (di, r) in d.iter_mut().zip(&self.map.region) {
            match r {
                Region::LeftAction => *di += g_minus,
                Region::RightAction => *di += g_plus,
                _ => {}
            }
        }
        Ok(())
    }
}

/// Output of [`solve_controlled_patch_pde`].
#[derive(Clone, Debug)]
pub struct PatchRun<T> {
    pub times: Vec<T>,
    /// Core average at each output time.
    pub core: Vec<T>,
    /// Fields at each output time when `record_fields` is set.
    pub fields: Vec<GridField<T>>,
    pub final_field: GridField<T>,
}

/// Integrates `T_t = K T_xx + (Kμ/h²) g(x, T)` on the `2h`-periodic patch, with
/// `g` the piecewise-constant action-region control towards the targets
/// interpolated from the core average and the wall temperatures.
pub fn solve_controlled_patch_pde<T: Real>(
    cfg: &ControlledPdeConfig<T>,
    t_left: impl Fn(T) -> T,
    t_right: impl Fn(T) -> T,
    ic: impl Fn(T) -> T,
) -> Result<PatchRun<T>> {
    run_patch(cfg, &t_left, &t_right, &ic, None)
}

/// Runs from the constant state `(T_L + T_R)/2` until the largest time
/// derivative falls below `tol` (checked at output times) or `t_end` passes.
/// Returns the final field and whether the tolerance was met.
pub fn steady_controlled_patch<T: Real>(
    cfg: &ControlledPdeConfig<T>,
    t_left: T,
    t_right: T,
    tol: T,
) -> Result<(GridField<T>, bool)> {
    let mid = (t_left + t_right) / T::of(2.0);
    let run = run_patch(cfg, &|_| t_left, &|_| t_right, &|_| mid, Some(tol))?;
    let mut probe = ControlledPatch {
        cfg,
        map: RegionMap::new(cfg),
        k_dx2: cfg.diffusivity / sq(cfg.dx()),
        gain: cfg.diffusivity * cfg.mu / sq(cfg.geometry.half_width()),
        left: &|_: T| t_left,
        right: &|_: T| t_right,
    };
    let mut d = vec![T::zero(); cfg.n];
    probe.rhs(run.final_field.t, &run.final_field.values, &mut d)?;
    let converged = d.iter().all(|v| v.abs() < tol);
    Ok((run.final_field, converged))
}

fn run_patch<T: Real, L: Fn(T) -> T, R: Fn(T) -> T>(
    cfg: &ControlledPdeConfig<T>,
    t_left: &L,
    t_right: &R,
    ic: &dyn Fn(T) -> T,
    stop_tol: Option<T>,
) -> Result<PatchRun<T>> {
    cfg.validate()?;
    if !(cfg.mu >= T::zero()) {
        return config_err("control strength must be non-negative");
    }
    let dt = cfg.time_step()?;
    let x = cfg.cell_centres();
    let dx = cfg.dx();
    let mut u: Vec<T> = x.iter().map(|&xi| ic(xi)).collect();
    let make = || ControlledPatch {
        cfg,
        map: RegionMap::new(cfg),
        k_dx2: cfg.diffusivity / (dx * dx),
        gain: cfg.diffusivity * cfg.mu / sq(cfg.geometry.half_width()),
        left: t_left,
        right: t_right,
    };
    let mut sys = make();
    let mut probe = make();
    let mut scratch = vec![T::zero(); cfg.n];
    let map = RegionMap::new(cfg);
    let mut times = Vec::new();
    let mut core = Vec::new();
    let mut fields = Vec::new();
    let mut last_t = T::zero();
    let t_final = run_fixed_step(&mut sys, &mut u, cfg.t_end, dt, cfg.output_interval, |t, u| {
        times.push(t);
        core.push(map.averages(u)[0]);
        if cfg.record_fields {
            fields.push(GridField { x: x.clone(), values: u.to_vec(), dx, t });
        }
        last_t = t;
        if let Some(tol) = stop_tol {
            probe.rhs(t, u, &mut scratch)?;
            if t > T::zero() && scratch.iter().all(|v| v.abs() < tol) {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    debug_assert!(t_final == last_t);
    Ok(PatchRun { times, core, fields, final_field: GridField { x, values: u, dx, t: t_final } })
}
