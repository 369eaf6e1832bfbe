//! Finite-difference solvers for the macroscale heat equation, the controlled
//! single-patch diffusion PDE and the multi-patch controlled advection-diffusion
//! system, plus the discrete macroscale model they are compared against.

mod heat;
mod multipatch;
mod patch;

pub use heat::{solve_heat_reference, HeatConfig};
pub use multipatch::{
    constant_patches, macro_ode_rhs, solve_macro_ode, solve_multipatch_pde, MultipatchRun,
};
pub use patch::{equilibrium_profile, solve_controlled_patch_pde, steady_controlled_patch, PatchRun};

use crate::error::{config_err, Result};
use crate::geometry::{MacroDomain, PatchGeometry};
use crate::scalar::Real;

/// Largest `K·dt/dx²` accepted by the explicit solvers.
pub const STABILITY_LIMIT: f64 = 0.5;
/// `K·dt/dx²` used when no time step is given.
pub const DEFAULT_DIFFUSION_NUMBER: f64 = 0.25;

/// Samples of a field on a uniform grid at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField<T> {
    pub x: Vec<T>,
    pub values: Vec<T>,
    pub dx: T,
    pub t: T,
}

/// Parameters shared by the controlled patch solvers.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlledPdeConfig<T> {
    pub diffusivity: T,
    /// Advection speed `α` (multi-patch only).
    pub alpha: T,
    pub mu: T,
    /// Inter-patch coupling `γ` (multi-patch only).
    pub gamma: T,
    /// Patch half-width `h` and macroscale length `H`; for several patches `H`
    /// is the spacing between patch centres.
    pub geometry: PatchGeometry<T>,
    pub domain: MacroDomain<T>,
    /// Cells per patch, a multiple of 8.
    pub n: usize,
    /// Time step; `None` picks `0.25·dx²/K`.
    pub dt: Option<T>,
    pub t_end: T,
    pub output_interval: T,
    pub record_fields: bool,
}

impl<T: Real> ControlledPdeConfig<T> {
    pub fn new(geometry: PatchGeometry<T>, domain: MacroDomain<T>, n: usize) -> Self {
        Self {
            diffusivity: T::one(),
            alpha: T::zero(),
            mu: T::of(30.0),
            gamma: T::one(),
            geometry,
            domain,
            n,
            dt: None,
            t_end: T::one(),
            output_interval: T::of(0.1),
            record_fields: false,
        }
    }

    pub fn dx(&self) -> T {
        self.geometry.side() / T::of_usize(self.n)
    }

    /// Cell centres `-h + (i + 1/2)·dx` of one patch in local coordinates.
    pub fn cell_centres(&self) -> Vec<T> {
        let dx = self.dx();
        let h = self.geometry.half_width();
        (0..self.n).map(|i| -h + (T::of_usize(i) + T::of(0.5)) * dx).collect()
    }

    pub fn time_step(&self) -> Result<T> {
        resolve_dt(self.dt, self.dx(), self.diffusivity)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n % 8 != 0 {
            return config_err(format!("cells per patch must be a positive multiple of 8, got {}", self.n));
        }
        if !(self.diffusivity > T::zero()) {
            return config_err("diffusivity must be positive");
        }
        if !(self.mu >= T::zero()) {
            return config_err(format!("control strength must be non-negative, got {}", self.mu));
        }
        if !(self.t_end > T::zero()) || !(self.output_interval > T::zero()) {
            return config_err("end time and output interval must be positive");
        }
        if !self.alpha.is_finite() || !self.gamma.is_finite() {
            return config_err("advection speed and coupling must be finite");
        }
        self.domain.validate()?;
        self.time_step().map(|_| ())
    }
}

/// Checks a requested step against the diffusive bound, or picks the default.
pub(crate) fn resolve_dt<T: Real>(dt: Option<T>, dx: T, diffusivity: T) -> Result<T> {
    let bound = T::of(STABILITY_LIMIT) * dx * dx / diffusivity;
    match dt {
        None => Ok(T::of(DEFAULT_DIFFUSION_NUMBER) * dx * dx / diffusivity),
        Some(dt) if dt > T::zero() && dt <= bound => Ok(dt),
        Some(dt) => config_err(format!(
            "time step {dt} violates the diffusive stability bound {bound} (0.5·dx²/K)"
        )),
    }
}
