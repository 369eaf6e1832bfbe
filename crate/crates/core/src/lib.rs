//! Controlled periodic patches of Lennard-Jones atoms coupled across
//! macroscale gaps, together with the continuum analogues and the spectral
//! analysis used to choose the control strength.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`.

pub mod continuum;
pub mod coupling;
mod error;
pub mod geometry;
pub mod md;
pub mod ode;
mod scalar;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
/// Version of this library, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use scalar::Real;

pub type PatchGeometry64 = geometry::PatchGeometry<f64>;
pub type SimConfig64 = md::SimConfig<f64>;
pub type AtomState64 = md::AtomState<f64>;
pub type RegionTemperatures64 = coupling::RegionTemperatures<f64>;
