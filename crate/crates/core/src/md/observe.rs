use crate::coupling::RegionTemperatures;
use crate::error::{Error, Result};
use crate::geometry::{min_image_displacement3, wrap, PatchGeometry, Region};
use crate::md::forces::lj_potential;
use crate::md::{AtomState, SimConfig};
use crate::scalar::Real;

/// Kinetic, potential and total energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Energies<T> {
    pub kinetic: T,
    pub potential: T,
    pub total: T,
}

pub fn energies<T: Real>(state: &AtomState<T>, cfg: &SimConfig<T>) -> Energies<T> {
    let half = T::of(0.5);
    let kinetic = state
        .velocities
        .iter()
        .map(|q| half * (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]))
        .sum::<T>();
    let wrapped = state.wrapped_positions(cfg.side);
    let mut potential = T::zero();
    for i in 0..wrapped.len() {
        for j in (i + 1)..wrapped.len() {
            let d = min_image_displacement3(&wrapped[i], &wrapped[j], cfg.side);
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            potential += lj_potential(r + cfg.dist_guard);
        }
    }
    Energies { kinetic, potential, total: kinetic + potential }
}

/// Column names of the trajectory CSV.
pub const AUX_HEADER: [&str; 13] =
    ["t", "Tl", "Tc", "Tr", "ul", "vl", "wl", "uc", "vc", "wc", "ur", "vr", "wr"];

/// Temperatures and mean velocities of the left action, core and right action
/// regions. An empty region reports `NaN` for its entries and zero count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Auxiliaries<T> {
    pub temps: RegionTemperatures<T>,
    pub mean_velocity: [[T; 3]; 3],
    pub counts: [usize; 3],
}

impl<T: Real> Auxiliaries<T> {
    /// The twelve values in [`AUX_HEADER`] order (without `t`).
    pub fn to_row(&self) -> [T; 12] {
        let v = &self.mean_velocity;
        [
            self.temps.left,
            self.temps.core,
            self.temps.right,
            v[0][0], v[0][1], v[0][2],
            v[1][0], v[1][1], v[1][2],
            v[2][0], v[2][1], v[2][2],
        ]
    }

    /// First of the three regions with no atoms.
    pub fn empty_region(&self) -> Option<Region> {
        [Region::LeftAction, Region::Core, Region::RightAction]
            .into_iter()
            .zip(self.counts)
            .find(|&(_, c)| c == 0)
            .map(|(r, _)| r)
    }
}

fn slot(region: Region) -> Option<usize> {
    match region {
        Region::LeftAction => Some(0),
        Region::Core => Some(1),
        Region::RightAction => Some(2),
        Region::Buffer => None,
    }
}

/// Region statistics from positions and velocities; `xs` are x-coordinates,
/// wrapped or not.
pub(crate) fn region_stats<'a, T: Real>(
    xs: impl Iterator<Item = T>,
    velocities: impl Iterator<Item = &'a [T; 3]>,
    geom: &PatchGeometry<T>,
) -> Auxiliaries<T> {
    let mut ke = [T::zero(); 3];
    let mut vel = [[T::zero(); 3]; 3];
    let mut counts = [0usize; 3];
    let side = geom.side();
    for (x, q) in xs.zip(velocities) {
        if let Some(s) = slot(geom.classify(wrap(x, side))) {
            counts[s] += 1;
            ke[s] += T::of(0.5) * (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
            for k in 0..3 {
                vel[s][k] += q[k];
            }
        }
    }
    let mut temps = [T::nan(); 3];
    let mut mean_velocity = [[T::nan(); 3]; 3];
    for s in 0..3 {
        if counts[s] > 0 {
            let n = T::of_usize(counts[s]);
            temps[s] = ke[s] / n;
            for k in 0..3 {
                mean_velocity[s][k] = vel[s][k] / n;
            }
        }
    }
    Auxiliaries {
        temps: RegionTemperatures { left: temps[0], core: temps[1], right: temps[2] },
        mean_velocity,
        counts,
    }
}

/// Temperatures and mean velocities of all three regions; empty regions are `NaN`.
pub fn region_observables<T: Real>(state: &AtomState<T>, geom: &PatchGeometry<T>) -> Auxiliaries<T> {
    region_stats(state.positions.iter().map(|p| p[0]), state.velocities.iter(), geom)
}

/// Mean kinetic energy per atom in each region. Errors if any region is empty.
pub fn region_temperatures<T: Real>(state: &AtomState<T>, geom: &PatchGeometry<T>) -> Result<RegionTemperatures<T>> {
    let aux = region_observables(state, geom);
    match aux.empty_region() {
        Some(region) => Err(Error::RegionEmpty { region, t: state.t.to_f64_lossy() }),
        None => Ok(aux.temps),
    }
}
