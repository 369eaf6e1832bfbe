//! Eigenmode analysis of the controlled patch, optimal control strengths and
//! the numerically constructed slow manifold of the multi-patch scheme.

mod roots;
mod slow_manifold;

pub use roots::{
    antisymmetric_char_residual, characteristic_residual, find_mode_roots, find_mode_roots_with,
    symmetric_char_residual, symmetric_char_residual_with, CouplingFactor, ModeBranch, ModeRoot, Symmetry,
};
pub use slow_manifold::{
    construct_slow_manifold, equivalent_pde, OrderTag, DEG, ORDERS, PiecewiseField, SlowManifold, StencilModel,
};

use crate::error::Result;
use crate::scalar::{sq, Real};

/// Leading-order macroscale wavenumber `kH ≈ sqrt(6/(1 + 48/μ))` of the
/// controlled single patch. The scale ratio does not enter at this order.
pub fn macro_wavenumber_approx<T: Real>(_r: T, mu: T) -> T {
    (T::of(6.0) / (T::one() + T::of(48.0) / mu)).sqrt()
}

/// Control strength making the single-patch macroscale wavenumber `π/2`, the
/// gravest mode of the macroscale domain: `1/μ = (24/π² - 1)/48`.
pub fn optimal_mu_single_patch<T: Real>() -> T {
    T::of(48.0) / (T::of(24.0) / sq(T::PI()) - T::one())
}

/// Control strengths for which the multi-patch model has the correct
/// advection speed and the correct diffusivity: `(120 + 24√69)/11` and `24`.
pub fn optimal_mu_multipatch<T: Real>() -> (T, T) {
    let adv = (T::of(120.0) + T::of(24.0) * T::of(69.0).sqrt()) / T::of(11.0);
    (adv, T::of(24.0))
}

/// Ratio of modelled to true advection speed, `15/(4(1+48/μ)(1+12/μ))`.
pub fn advection_ratio<T: Real>(mu: T) -> T {
    T::of(15.0) / (T::of(4.0) * (T::one() + T::of(48.0) / mu) * (T::one() + T::of(12.0) / mu))
}

/// Ratio of modelled to true diffusivity, `3/(1+48/μ)`.
pub fn diffusion_ratio<T: Real>(mu: T) -> T {
    T::of(3.0) / (T::one() + T::of(48.0) / mu)
}

/// Microscale diffusivity `4h²/(9π²)` implied by a leading antisymmetric mode
/// with `k₃h ≈ 3π/2` decaying at unit rate.
pub fn estimate_diffusivity<T: Real>(h: T) -> T {
    T::of(4.0) * sq(h) / (T::of(9.0) * sq(T::PI()))
}

/// Diffusivity implied by a measured microscale decay rate `σ` when the leading
/// antisymmetric wavenumber is `k₃`: `K = σ/k₃²`.
pub fn diffusivity_from_decay<T: Real>(rate: T, k3: T) -> T {
    rate / sq(k3)
}

/// Lower bound `β = 9K/h²` on the decay rate of every microscale mode.
pub fn spectral_gap_bound<T: Real>(diffusivity: T, h: T) -> T {
    T::of(9.0) * diffusivity / sq(h)
}

/// Checks that the first `count` sub-macroscale modes of both symmetries decay
/// faster than [`spectral_gap_bound`], using the multi-patch linearisation
/// (unit coupling factor). Returns the slowest such rate.
pub fn verify_spectral_gap<T: Real>(diffusivity: T, h: T, mu: T, count: usize) -> Result<(T, bool)> {
    let beta = spectral_gap_bound(diffusivity, h);
    let mut slowest = T::infinity();
    for sym in [Symmetry::Symmetric, Symmetry::Antisymmetric] {
        for m in find_mode_roots_with(sym, h, T::zero(), mu, diffusivity, count, CouplingFactor::Unit)? {
            slowest = slowest.min(-m.lambda);
        }
    }
    Ok((slowest, slowest > beta))
}
