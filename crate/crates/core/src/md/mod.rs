//! Lennard-Jones atoms in a triply periodic cubic patch, optionally driven by the
//! proportional temperature controller in the two action regions.
//!
//! Positions are integrated unwrapped so the integrator never sees the jump of
//! an atom re-entering through the opposite face; they are wrapped into the cube
//! only for force evaluation, region classification and output.

mod forces;
mod init;
mod integrate;
mod observe;
mod transient;

pub use forces::{compute_forces, lj_force_factor, lj_potential, pair_force_scale};
pub use init::init_atoms;
pub use integrate::{integrate, integrate_with, PatchDynamics, Trajectory, TrajectoryRecord};
pub use transient::{estimate_diffusivity_from_gap, gap_series, GapDecay};
pub use observe::{
    energies, region_observables, region_temperatures, Auxiliaries, Energies, AUX_HEADER,
};

use crate::error::{config_err, Result};
use crate::geometry::{wrap, PatchGeometry};
use crate::scalar::Real;

/// Positions and velocities of every atom plus the simulation clock.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomState<T> {
    pub positions: Vec<[T; 3]>,
    pub velocities: Vec<[T; 3]>,
    pub t: T,
}

impl<T: Real> AtomState<T> {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Positions mapped into the cube `[-side/2, side/2]³`.
    pub fn wrapped_positions(&self, side: T) -> Vec<[T; 3]> {
        self.positions
            .iter()
            .map(|p| [wrap(p[0], side), wrap(p[1], side), wrap(p[2], side)])
            .collect()
    }

    pub fn total_momentum(&self) -> [T; 3] {
        let mut p = [T::zero(); 3];
        for q in &self.velocities {
            for k in 0..3 {
                p[k] += q[k];
            }
        }
        p
    }

    /// Flat layout used by the integrators: all positions, then all velocities.
    pub fn to_flat(&self) -> Vec<T> {
        let mut y = Vec::with_capacity(6 * self.len());
        y.extend(self.positions.iter().flatten());
        y.extend(self.velocities.iter().flatten());
        y
    }

    pub fn from_flat(y: &[T], t: T) -> Self {
        let n = y.len() / 6;
        let chunk = |s: &[T]| s.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect::<Vec<_>>();
        Self {
            positions: chunk(&y[..3 * n]),
            velocities: chunk(&y[3 * n..6 * n]),
            t,
        }
    }
}

/// Time integration scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Integrator<T> {
    /// Fixed-step classic Runge-Kutta.
    Rk4 { dt: T },
    /// Embedded Bogacki-Shampine 3(2) pair.
    Adaptive { rtol: T, atol: T, initial_dt: T },
}

/// What to do when a controlled run finds an empty core or action region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EmptyRegionPolicy {
    #[default]
    Error,
    /// Reuse the last measured temperature of that region (logs a warning).
    HoldLast,
}

/// Parameters of one atomistic patch run.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig<T> {
    pub atoms: usize,
    /// Cube side `2h`.
    pub side: T,
    pub t_end: T,
    /// Control strength; zero gives the isolated patch.
    pub mu: T,
    /// Diffusivity `K` in the control gain.
    pub diffusivity: T,
    pub temp_left: T,
    pub temp_right: T,
    /// Distance `H` from the patch centre to the walls.
    pub macro_half_width: T,
    pub seed: u64,
    pub force_cap: T,
    pub dist_guard: T,
    pub temp_floor: T,
    pub integrator: Integrator<T>,
    /// Time between recorded auxiliaries.
    pub output_interval: T,
    pub empty_region: EmptyRegionPolicy,
    pub record_energies: bool,
    pub record_snapshots: bool,
}

impl<T: Real> SimConfig<T> {
    /// Isolated patch of `atoms` atoms at unit number density: side `N^(1/3)`,
    /// walls at `±side`, `K = 0.5`, RK4 with `dt = 0.002` up to `t = 3`.
    pub fn new(atoms: usize, seed: u64) -> Self {
        let side = T::of_usize(atoms).cbrt();
        Self {
            atoms,
            side,
            t_end: T::of(3.0),
            mu: T::zero(),
            diffusivity: T::of(0.5),
            temp_left: T::of(0.5),
            temp_right: T::of(1.5),
            macro_half_width: side,
            seed,
            force_cap: T::of(100.0),
            dist_guard: T::of(1e-8),
            temp_floor: T::of(1e-6),
            integrator: Integrator::Rk4 { dt: T::of(0.002) },
            output_interval: T::of(0.1),
            empty_region: EmptyRegionPolicy::Error,
            record_energies: false,
            record_snapshots: false,
        }
    }

    pub fn geometry(&self) -> Result<PatchGeometry<T>> {
        PatchGeometry::new(self.side / T::of(2.0), self.macro_half_width)
    }

    /// Number of lattice cells per axis used by [`init_atoms`].
    pub fn cells_per_axis(&self) -> usize {
        self.side.ceil().to_usize().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let zero = T::zero();
        if self.atoms == 0 {
            return config_err("need at least one atom");
        }
        if !(self.side > zero) || !self.side.is_finite() {
            return config_err(format!("side must be positive, got {}", self.side));
        }
        let ns = self.cells_per_axis();
        if self.atoms > ns.pow(3) {
            return config_err(format!(
                "{} atoms exceed the {} lattice cells of a side-{} cube",
                self.atoms,
                ns.pow(3),
                self.side
            ));
        }
        if !(self.t_end > zero) {
            return config_err(format!("end time must be positive, got {}", self.t_end));
        }
        if !(self.mu >= zero) {
            return config_err(format!("control strength must be non-negative, got {}", self.mu));
        }
        if self.mu > zero {
            if !(self.temp_left > zero && self.temp_right > zero) {
                return config_err("boundary temperatures must be positive when control is on");
            }
            if !(self.diffusivity > zero) {
                return config_err("diffusivity must be positive when control is on");
            }
        }
        if !(self.force_cap > zero) || !(self.dist_guard >= zero) || !(self.temp_floor > zero) {
            return config_err("force cap, distance guard and temperature floor must be positive");
        }
        if !(self.output_interval > zero) {
            return config_err("output interval must be positive");
        }
        match self.integrator {
            Integrator::Rk4 { dt } if !(dt > zero) => return config_err("time step must be positive"),
            Integrator::Adaptive { rtol, atol, initial_dt }
                if !(rtol > zero && atol > zero && initial_dt > zero) =>
            {
                return config_err("adaptive tolerances and initial step must be positive")
            }
            _ => {}
        }
        self.geometry().map(|_| ())
    }
}
