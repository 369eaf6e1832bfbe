//! Macroscale-to-patch coupling: parabolic interpolation of the boundary and
//! core temperatures, the proportional control acceleration applied to atoms in
//! the action regions, and the Lagrange interpolation between neighbouring
//! patches used by the multi-patch scheme.

use crate::error::{config_err, Result};
use crate::geometry::Region;
use crate::scalar::{sq, Real};

/// Mean kinetic energy per atom in the left action, core and right action regions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionTemperatures<T> {
    pub left: T,
    pub core: T,
    pub right: T,
}

/// Interpolated patch-centre temperature and action-region set points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingTargets<T> {
    pub center: T,
    pub minus: T,
    pub plus: T,
}

/// Patch-centre temperature `T_0` from the core mean `T_c`, correcting for the
/// finite width of the core under a parabolic macroscale profile.
pub fn core_to_center<T: Real>(t_core: T, t_left: T, t_right: T, h: T, big_h: T) -> T {
    let rho2 = sq(h / (T::of(4.0) * big_h));
    (t_core - (t_left + t_right) * rho2 / T::of(6.0)) / (T::one() - rho2 / T::of(3.0))
}

/// Parabola through `(-H, T_L)`, `(0, T_0)` and `(H, T_R)` evaluated at `x`.
pub fn parabolic_interpolant<T: Real>(t_left: T, t_center: T, t_right: T, big_h: T, x: T) -> T {
    let two_h2 = T::of(2.0) * sq(big_h);
    t_left * x * (x - big_h) / two_h2
        + t_center * (sq(big_h) - sq(x)) / sq(big_h)
        + t_right * x * (x + big_h) / two_h2
}

/// Averages of the parabolic interpolant over the two action regions.
pub fn action_targets<T: Real>(t_center: T, t_left: T, t_right: T, h: T, big_h: T) -> CouplingTargets<T> {
    let rho = h / (T::of(4.0) * big_h);
    let gradient = (t_right - t_left) * rho;
    let curvature = T::of(13.0 / 6.0) * (t_right - T::of(2.0) * t_center + t_left) * sq(rho);
    CouplingTargets {
        center: t_center,
        minus: t_center - gradient + curvature,
        plus: t_center + gradient + curvature,
    }
}

/// Targets for a single patch between walls at `±H` held at `t_left`, `t_right`,
/// given the measured core temperature.
pub fn targets_from_core<T: Real>(t_core: T, t_left: T, t_right: T, h: T, big_h: T) -> CouplingTargets<T> {
    let t0 = core_to_center(t_core, t_left, t_right, h, big_h);
    action_targets(t0, t_left, t_right, h, big_h)
}

/// Proportional controller gain parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlGain<T> {
    /// Control strength `μ`.
    pub mu: T,
    /// Diffusivity `K` used to scale the gain.
    pub diffusivity: T,
    /// Patch half-width `h`.
    pub h: T,
    /// Lower clamp applied to measured temperatures in denominators.
    pub temp_floor: T,
}

impl<T: Real> ControlGain<T> {
    /// Multiplier of the velocity for an atom in `region`:
    /// `Kμ/(2h²T)·(T_target - T)` in the action regions, zero elsewhere.
    pub fn rate(&self, region: Region, temps: &RegionTemperatures<T>, targets: &CouplingTargets<T>) -> T {
        let (measured, target) = match region {
            Region::RightAction => (temps.right, targets.plus),
            Region::LeftAction => (temps.left, targets.minus),
            Region::Core | Region::Buffer => return T::zero(),
        };
        let denom = T::of(2.0) * sq(self.h) * measured.max(self.temp_floor);
        self.diffusivity * self.mu / denom * (target - measured)
    }
}

/// Control acceleration for an atom with velocity `q` in `region`.
pub fn control_acceleration<T: Real>(
    q: [T; 3],
    region: Region,
    temps: &RegionTemperatures<T>,
    targets: &CouplingTargets<T>,
    gain: &ControlGain<T>,
) -> [T; 3] {
    let rate = gain.rate(region, temps, targets);
    [rate * q[0], rate * q[1], rate * q[2]]
}

/// Boundary treatment for the vector of core averages.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AmplitudeBoundary<T> {
    Periodic,
    /// Wall values standing in for `U_0` and `U_{M+1}`.
    Dirichlet { left: T, right: T },
}

/// Core averages `U_j` of every patch with the coupling parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct CoreAmplitudes<T> {
    pub values: Vec<T>,
    /// Homotopy parameter `γ ∈ [0, 1]`.
    pub gamma: T,
    /// Scale ratio `r = h/H`.
    pub r: T,
    pub boundary: AmplitudeBoundary<T>,
}

impl<T: Real> CoreAmplitudes<T> {
    /// `U_{j+offset}` for the 0-based patch index `j`, using the periodic wrap or the
    /// Dirichlet synonyms one step past either end.
    pub fn neighbor(&self, j: usize, offset: isize) -> Result<T> {
        let m = self.values.len() as isize;
        let idx = j as isize + offset;
        match self.boundary {
            AmplitudeBoundary::Periodic => Ok(self.values[idx.rem_euclid(m) as usize]),
            AmplitudeBoundary::Dirichlet { left, right } => {
                if (0..m).contains(&idx) {
                    Ok(self.values[idx as usize])
                } else if idx == -1 {
                    Ok(left)
                } else if idx == m {
                    Ok(right)
                } else {
                    config_err(format!(
                        "patch {j}: neighbour offset {offset} lies beyond the boundary synonyms"
                    ))
                }
            }
        }
    }
}

/// Centred-difference operators evaluated at one patch.
#[derive(Clone, Copy, Debug)]
struct Differences<T> {
    mean_delta: T,
    delta2: T,
    mean_delta3: T,
    delta4: T,
}

fn differences<T: Real>(u: [T; 5]) -> Differences<T> {
    let [um2, um1, u0, up1, up2] = u;
    let two = T::of(2.0);
    Differences {
        mean_delta: (up1 - um1) / two,
        delta2: up1 - two * u0 + um1,
        mean_delta3: (up2 - two * up1 + two * um1 - um2) / two,
        delta4: up2 - T::of(4.0) * (up1 + um1) + T::of(6.0) * u0 + um2,
    }
}

fn interpolate<T: Real>(u0: T, d: &Differences<T>, gamma: T, r: T, first_order_only: bool) -> (T, T) {
    let half = T::of(0.5);
    let odd1 = half * r * d.mean_delta;
    let even1 = sq(r) / T::of(8.0) * d.delta2;
    let (odd2, even2) = if first_order_only {
        (T::zero(), T::zero())
    } else {
        (
            r * (T::of(0.25) - r / T::of(8.0)) * d.mean_delta3,
            r * (T::of(0.125) - r / T::of(16.0)) * d.delta4,
        )
    };
    let g2 = sq(gamma);
    let minus = u0 + gamma * (-odd1 + even1) + g2 * (odd2 - even2);
    let plus = u0 + gamma * (odd1 + even1) + g2 * (-odd2 - even2);
    (minus, plus)
}

/// Interpolated values `(I_j^-, I_j^+)` at the mid-action points `X_j ∓ h/2`,
/// using centred differences up to fourth order truncated after the `γ²` terms.
pub fn lagrange_action_targets<T: Real>(amps: &CoreAmplitudes<T>, j: usize) -> Result<(T, T)> {
    if j >= amps.values.len() {
        return config_err(format!("patch index {j} out of range"));
    }
    let mut u = [T::zero(); 5];
    for (slot, off) in u.iter_mut().zip(-2isize..=2) {
        *slot = amps.neighbor(j, off)?;
    }
    Ok(interpolate(u[2], &differences(u), amps.gamma, amps.r, false))
}

/// As [`lagrange_action_targets`], but falls back to the first-order (three-point)
/// terms where the five-point stencil would reach past the boundary synonyms.
pub fn lagrange_action_targets_near_boundary<T: Real>(amps: &CoreAmplitudes<T>, j: usize) -> Result<(T, T)> {
    match lagrange_action_targets(amps, j) {
        Ok(v) => Ok(v),
        Err(_) => {
            let um1 = amps.neighbor(j, -1)?;
            let u0 = amps.neighbor(j, 0)?;
            let up1 = amps.neighbor(j, 1)?;
            let d = differences([um1, um1, u0, up1, up1]);
            Ok(interpolate(u0, &d, amps.gamma, amps.r, true))
        }
    }
}
