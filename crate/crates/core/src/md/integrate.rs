use std::ops::ControlFlow;

use crate::coupling::{control_acceleration, targets_from_core, ControlGain, RegionTemperatures};
use crate::error::{Error, Result};
use crate::geometry::{wrap, PatchGeometry, Region};
use crate::md::forces::accumulate_accelerations;
use crate::md::observe::{energies, region_stats, Auxiliaries, Energies};
use crate::md::{init_atoms, AtomState, EmptyRegionPolicy, Integrator, SimConfig};
use crate::ode::{BogackiShampine, OdeSystem, Rk4, Tolerance};
use crate::scalar::Real;

/// Observables recorded at one output time.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord<T> {
    pub t: T,
    pub aux: Auxiliaries<T>,
    pub momentum: [T; 3],
    pub energies: Option<Energies<T>>,
    pub snapshot: Option<AtomState<T>>,
}

/// Result of [`integrate`].
#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub records: Vec<TrajectoryRecord<T>>,
    pub final_state: AtomState<T>,
    /// Pair evaluations where the force cap engaged, over all derivative evaluations.
    pub cap_events: u64,
    pub rhs_evaluations: u64,
}

/// Equations of motion of the patch atoms over the flat state
/// `[positions; velocities]`.
pub struct PatchDynamics<'a, T> {
    cfg: &'a SimConfig<T>,
    geom: PatchGeometry<T>,
    gain: ControlGain<T>,
    wrapped: Vec<[T; 3]>,
    acc: Vec<[T; 3]>,
    last_temps: Option<RegionTemperatures<T>>,
    pub cap_events: u64,
    pub evaluations: u64,
}

impl<'a, T: Real> PatchDynamics<'a, T> {
    pub fn new(cfg: &'a SimConfig<T>) -> Result<Self> {
        let geom = cfg.geometry()?;
        Ok(Self {
            cfg,
            geom,
            gain: ControlGain {
                mu: cfg.mu,
                diffusivity: cfg.diffusivity,
                h: geom.half_width(),
                temp_floor: cfg.temp_floor,
            },
            wrapped: vec![[T::zero(); 3]; cfg.atoms],
            acc: vec![[T::zero(); 3]; cfg.atoms],
            last_temps: None,
            cap_events: 0,
            evaluations: 0,
        })
    }

    fn control_temperatures(&mut self, aux: &Auxiliaries<T>, t: T) -> Result<RegionTemperatures<T>> {
        let Some(region) = aux.empty_region() else {
            self.last_temps = Some(aux.temps);
            return Ok(aux.temps);
        };
        let err = Error::RegionEmpty { region, t: t.to_f64_lossy() };
        match (self.cfg.empty_region, self.last_temps) {
            (EmptyRegionPolicy::HoldLast, Some(last)) => {
                log::warn!("{} region empty at t = {t}; holding last temperature", region.name());
                let pick = |now: T, before: T| if now.is_nan() { before } else { now };
                let temps = RegionTemperatures {
                    left: pick(aux.temps.left, last.left),
                    core: pick(aux.temps.core, last.core),
                    right: pick(aux.temps.right, last.right),
                };
                self.last_temps = Some(temps);
                Ok(temps)
            }
            _ => Err(err),
        }
    }
}

impl<T: Real> OdeSystem<T> for PatchDynamics<'_, T> {
    fn dim(&self) -> usize {
        6 * self.cfg.atoms
    }

    fn rhs(&mut self, t: T, y: &[T], dydt: &mut [T]) -> Result<()> {
        self.evaluations += 1;
        let n = self.cfg.atoms;
        let side = self.cfg.side;
        let (pos, vel) = y.split_at(3 * n);
        for (w, p) in self.wrapped.iter_mut().zip(pos.chunks_exact(3)) {
            if !(p[0].is_finite() && p[1].is_finite() && p[2].is_finite()) {
                return Err(Error::Numeric(format!("non-finite atom position at t = {t}")));
            }
            *w = [wrap(p[0], side), wrap(p[1], side), wrap(p[2], side)];
        }
        self.cap_events +=
            accumulate_accelerations(&self.wrapped, side, self.cfg.dist_guard, self.cfg.force_cap, &mut self.acc) as u64;

        let (dx, dq) = dydt.split_at_mut(3 * n);
        dx.copy_from_slice(vel);
        for (d, a) in dq.chunks_exact_mut(3).zip(&self.acc) {
            d.copy_from_slice(a);
        }

        if self.cfg.mu > T::zero() {
            let velocities: Vec<[T; 3]> = vel.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
            let aux = region_stats(self.wrapped.iter().map(|w| w[0]), velocities.iter(), &self.geom);
            let temps = self.control_temperatures(&aux, t)?;
            let targets = targets_from_core(
                temps.core,
                self.cfg.temp_left,
                self.cfg.temp_right,
                self.geom.half_width(),
                self.geom.macro_length(),
            );
            for i in 0..n {
                let region = self.geom.classify(self.wrapped[i][0]);
                if matches!(region, Region::LeftAction | Region::RightAction) {
                    let c = control_acceleration(velocities[i], region, &temps, &targets, &self.gain);
                    for k in 0..3 {
                        dq[3 * i + k] += c[k];
                    }
                }
            }
        }
        Ok(())
    }
}

fn record<T: Real>(cfg: &SimConfig<T>, geom: &PatchGeometry<T>, y: &[T], t: T) -> TrajectoryRecord<T> {
    let state = AtomState::from_flat(y, t);
    let aux = region_stats(state.positions.iter().map(|p| p[0]), state.velocities.iter(), geom);
    TrajectoryRecord {
        t,
        aux,
        momentum: state.total_momentum(),
        energies: cfg.record_energies.then(|| energies(&state, cfg)),
        snapshot: cfg.record_snapshots.then_some(state),
    }
}

/// Runs the patch from [`init_atoms`] to `t_end`, recording at the output cadence.
pub fn integrate<T: Real>(cfg: &SimConfig<T>) -> Result<Trajectory<T>> {
    integrate_with(cfg, |_| ControlFlow::Continue(()))
}

/// As [`integrate`], calling `observer` on every record; returning
/// `ControlFlow::Break(reason)` stops the run with [`Error::Aborted`].
pub fn integrate_with<T: Real, F>(cfg: &SimConfig<T>, mut observer: F) -> Result<Trajectory<T>>
where
    F: FnMut(&TrajectoryRecord<T>) -> ControlFlow<String>,
{
    cfg.validate()?;
    let geom = cfg.geometry()?;
    let mut y = init_atoms(cfg)?.to_flat();
    let mut sys = PatchDynamics::new(cfg)?;
    let mut records = Vec::new();
    let mut push = |rec: TrajectoryRecord<T>, records: &mut Vec<_>| -> Result<()> {
        if let ControlFlow::Break(reason) = observer(&rec) {
            return Err(Error::Aborted { t: rec.t.to_f64_lossy(), reason });
        }
        records.push(rec);
        Ok(())
    };
    push(record(cfg, &geom, &y, T::zero()), &mut records)?;

    let t_end = cfg.t_end;
    match cfg.integrator {
        Integrator::Rk4 { dt } => {
            let steps = (t_end / dt - T::of(1e-6)).ceil().to_usize().unwrap_or(1).max(1);
            let dt = t_end / T::of_usize(steps);
            let every = (cfg.output_interval / dt).round().to_usize().unwrap_or(1).max(1);
            let mut rk = Rk4::new(y.len());
            for s in 0..steps {
                let t = T::of_usize(s) * dt;
                rk.step(&mut sys, t, dt, &mut y)?;
                if (s + 1) % every == 0 || s + 1 == steps {
                    push(record(cfg, &geom, &y, T::of_usize(s + 1) * dt), &mut records)?;
                }
            }
        }
        Integrator::Adaptive { rtol, atol, initial_dt } => {
            let mut bs = BogackiShampine::new(y.len(), Tolerance { rtol, atol });
            let mut t = T::zero();
            let mut dt = initial_dt;
            let mut k = 1usize;
            while t < t_end {
                let next_out = (T::of_usize(k) * cfg.output_interval).min(t_end);
                let clipped = dt.min(next_out - t);
                let step = bs.try_step(&mut sys, t, clipped, &mut y)?;
                if step.accepted {
                    t = if clipped == next_out - t { next_out } else { t + step.taken };
                    if t >= next_out {
                        push(record(cfg, &geom, &y, t), &mut records)?;
                        k += 1;
                    }
                    // keep the unclipped estimate so output times do not throttle the step
                    dt = if clipped < dt { dt.max(step.next) } else { step.next };
                } else {
                    dt = step.next;
                }
            }
        }
    }
    if sys.cap_events > 0 {
        log::info!("force cap engaged in {} pair evaluations", sys.cap_events);
    }
    Ok(Trajectory {
        final_state: AtomState::from_flat(&y, t_end),
        records,
        cap_events: sys.cap_events,
        rhs_evaluations: sys.evaluations,
    })
}
