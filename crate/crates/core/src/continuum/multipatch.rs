use crate::continuum::patch::{periodic_diffusion, RegionMap};
use crate::continuum::{ControlledPdeConfig, GridField};
use crate::coupling::{
    lagrange_action_targets, lagrange_action_targets_near_boundary, AmplitudeBoundary, CoreAmplitudes,
};
use crate::error::{config_err, Result};
use crate::geometry::{MacroDomain, Region};
use crate::ode::{run_fixed_step, OdeSystem};
use crate::scalar::{sq, Real};

fn amplitude_boundary<T: Real>(domain: &MacroDomain<T>) -> AmplitudeBoundary<T> {
    match *domain {
        MacroDomain::Periodic { .. } => AmplitudeBoundary::Periodic,
        MacroDomain::Dirichlet { left, right, .. } => AmplitudeBoundary::Dirichlet { left, right },
    }
}

/// Right-hand side of the emergent discrete model
/// `dU_j/dt = -a (U_{j+1} - U_{j-1}) + b (U_{j-1} - 2U_j + U_{j+1})` with
/// `a = 15α/(8H(1+48/μ)(1+12/μ))` and `b = 3K/(H²(1+48/μ))`.
pub fn macro_ode_rhs<T: Real>(amps: &CoreAmplitudes<T>, alpha: T, diffusivity: T, mu: T, big_h: T) -> Result<Vec<T>> {
    if amps.values.len() < 2 {
        return config_err("the macroscale model needs at least two patches");
    }
    let one = T::one();
    let p48 = one + T::of(48.0) / mu;
    let p12 = one + T::of(12.0) / mu;
    let a = T::of(15.0) * alpha / (T::of(8.0) * big_h * p48 * p12);
    let b = T::of(3.0) * diffusivity / (sq(big_h) * p48);
    (0..amps.values.len())
        .map(|j| {
            let um = amps.neighbor(j, -1)?;
            let up = amps.neighbor(j, 1)?;
            let u = amps.values[j];
            Ok(-a * (up - um) + b * (um - T::of(2.0) * u + up))
        })
        .collect()
}

struct MacroOde<'a, T> {
    cfg: &'a ControlledPdeConfig<T>,
}

impl<T: Real> OdeSystem<T> for MacroOde<'_, T> {
    fn dim(&self) -> usize {
        self.cfg.domain.patches()
    }

    fn rhs(&mut self, _t: T, y: &[T], d: &mut [T]) -> Result<()> {
        let amps = CoreAmplitudes {
            values: y.to_vec(),
            gamma: self.cfg.gamma,
            r: self.cfg.geometry.ratio(),
            boundary: amplitude_boundary(&self.cfg.domain),
        };
        let rhs = macro_ode_rhs(&amps, self.cfg.alpha, self.cfg.diffusivity, self.cfg.mu, self.cfg.geometry.macro_length())?;
        d.copy_from_slice(&rhs);
        Ok(())
    }
}

/// Integrates [`macro_ode_rhs`] from `u0` with the parameters of `cfg`, giving
/// the output times and amplitude vectors.
pub fn solve_macro_ode<T: Real>(cfg: &ControlledPdeConfig<T>, u0: &[T]) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    if u0.len() != cfg.domain.patches() {
        return config_err("initial amplitudes do not match the patch count");
    }
    if !(cfg.mu > T::zero()) {
        return config_err("the macroscale model needs a positive control strength");
    }
    let big_h = cfg.geometry.macro_length();
    let rate = T::of(3.0) * cfg.diffusivity / (sq(big_h) * (T::one() + T::of(48.0) / cfg.mu))
        + cfg.alpha.abs() / big_h;
    let dt = (T::of(0.05) / rate).min(cfg.output_interval);
    let mut y = u0.to_vec();
    let mut times = Vec::new();
    let mut amps = Vec::new();
    run_fixed_step(&mut MacroOde { cfg }, &mut y, cfg.t_end, dt, cfg.output_interval, |t, y| {
        times.push(t);
        amps.push(y.to_vec());
        Ok(true)
    })?;
    Ok((times, amps))
}

/// Every patch filled with the constant `values[j]`.
pub fn constant_patches<T: Real>(values: &[T], n: usize) -> Vec<Vec<T>> {
    values.iter().map(|&v| vec![v; n]).collect()
}

/// Output of [`solve_multipatch_pde`].
#[derive(Clone, Debug)]
pub struct MultipatchRun<T> {
    pub times: Vec<T>,
    /// Core averages `U_j` at each output time.
    pub amplitudes: Vec<Vec<T>>,
    /// Per-patch fields at each output time when `record_fields` is set.
    pub fields: Vec<Vec<GridField<T>>>,
    pub final_fields: Vec<GridField<T>>,
}

struct Multipatch<'a, T> {
    cfg: &'a ControlledPdeConfig<T>,
    map: RegionMap,
    k_dx2: T,
    adv: T,
    gain: T,
    targets: Vec<(T, T)>,
    cores: Vec<T>,
}

impl<T: Real> Multipatch<'_, T> {
    fn core_averages(&self, y: &[T]) -> Vec<T> {
        y.chunks_exact(self.cfg.n).map(|u| self.map.averages(u)[0]).collect()
    }
}

impl<T: Real> OdeSystem<T> for Multipatch<'_, T> {
    fn dim(&self) -> usize {
        self.cfg.n * self.cfg.domain.patches()
    }

    fn rhs(&mut self, _t: T, y: &[T], d: &mut [T]) -> Result<()> {
        let n = self.cfg.n;
        self.cores = self.core_averages(y);
        let amps = CoreAmplitudes {
            values: std::mem::take(&mut self.cores),
            gamma: self.cfg.gamma,
            r: self.cfg.geometry.ratio(),
            boundary: amplitude_boundary(&self.cfg.domain),
        };
        let periodic = matches!(self.cfg.domain, MacroDomain::Periodic { .. });
        self.targets.clear();
        for j in 0..amps.values.len() {
            self.targets.push(if periodic {
                lagrange_action_targets(&amps, j)?
            } else {
                lagrange_action_targets_near_boundary(&amps, j)?
            });
        }
        self.cores = amps.values;

        for ((u, dj), &(i_minus, i_plus)) in y.chunks_exact(n).zip(d.chunks_exact_mut(n)).zip(&self.targets) {
            periodic_diffusion(u, self.k_dx2, dj);
            if self.adv != T::zero() {
                for i in 0..n {
                    dj[i] -= self.adv * (u[(i + 1) % n] - u[(i + n - 1) % n]);
                }
            }
            if self.gain != T::zero() {
                let [_, left, right] = self.map.averages(u);
                let g_minus = self.gain * (i_minus - left);
                let g_plus = self.gain * (i_plus - right);
                for (di, r) in dj.iter_mut().zip(&self.map.region) {
                    match r {
                        Region::LeftAction => *di += g_minus,
                        Region::RightAction => *di += g_plus,
                        _ => {}
                    }
                }
            }
        }
        Ok(())
    }
}

/// Integrates `u_t = K u_xx - α u_x + (Kμ/h²)[(I⁺ - ū⁺)χ⁺ + (I⁻ - ū⁻)χ⁻]` in
/// every patch, with the action targets `I_j^±` interpolated from the current
/// core averages at each stage.
///
/// With Dirichlet walls, patches whose five-point stencil would reach past the
/// wall values use only the first-order interpolation terms.
pub fn solve_multipatch_pde<T: Real>(cfg: &ControlledPdeConfig<T>, ic: &[Vec<T>]) -> Result<MultipatchRun<T>> {
    cfg.validate()?;
    let m = cfg.domain.patches();
    if let MacroDomain::Periodic { .. } = cfg.domain {
        if m < 2 {
            return config_err("a periodic multi-patch domain needs at least two patches");
        }
    }
    if ic.len() != m || ic.iter().any(|u| u.len() != cfg.n) {
        return config_err(format!("initial condition must have {m} patches of {} cells", cfg.n));
    }
    let dt = cfg.time_step()?;
    let dx = cfg.dx();
    let mut sys = Multipatch {
        cfg,
        map: RegionMap::new(cfg),
        k_dx2: cfg.diffusivity / (dx * dx),
        adv: cfg.alpha / (dx + dx),
        gain: cfg.diffusivity * cfg.mu / sq(cfg.geometry.half_width()),
        targets: Vec::with_capacity(m),
        cores: Vec::with_capacity(m),
    };
    let local = cfg.cell_centres();
    let big_h = cfg.geometry.macro_length();
    let patch_x = |j: usize| -> Vec<T> {
        let c = cfg.domain.patch_center(j + 1, big_h);
        local.iter().map(|&x| c + x).collect()
    };
    let map = RegionMap::new(cfg);
    let split = |y: &[T], t: T| -> Vec<GridField<T>> {
        y.chunks_exact(cfg.n)
            .enumerate()
            .map(|(j, u)| GridField { x: patch_x(j), values: u.to_vec(), dx, t })
            .collect()
    };
    let mut y: Vec<T> = ic.iter().flatten().copied().collect();
    let mut times = Vec::new();
    let mut amplitudes = Vec::new();
    let mut fields = Vec::new();
    let t_final = run_fixed_step(&mut sys, &mut y, cfg.t_end, dt, cfg.output_interval, |t, y| {
        times.push(t);
        amplitudes.push(y.chunks_exact(cfg.n).map(|u| map.averages(u)[0]).collect());
        if cfg.record_fields {
            fields.push(split(y, t));
        }
        Ok(true)
    })?;
    Ok(MultipatchRun { times, amplitudes, fields, final_fields: split(&y, t_final) })
}
