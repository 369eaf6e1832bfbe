use crate::error::{Error, Result};
use crate::md::{AtomState, SimConfig};
use crate::scalar::Real;

/// Radial Lennard-Jones force `r⁻⁷ - r⁻¹³` (positive is attraction).
pub fn lj_force_factor<T: Real>(r: T) -> T {
    let inv = r.recip();
    let inv7 = inv.powi(7);
    inv7 - inv7 * inv.powi(6)
}

/// Pair potential `1/(12 r¹²) - 1/(6 r⁶)`, vanishing at infinity; its derivative
/// is [`lj_force_factor`].
pub fn lj_potential<T: Real>(r: T) -> T {
    let inv6 = r.recip().powi(6);
    inv6 * inv6 / T::of(12.0) - inv6 / T::of(6.0)
}

/// Force divided by distance at separation `r`, with the distance guard added
/// and the result clamped below at `-cap`. Returns the scale and whether the
/// clamp engaged.
#[inline]
pub fn pair_force_scale<T: Real>(r: T, guard: T, cap: T) -> (T, bool) {
    let inv = (r + guard).recip();
    let inv2 = inv * inv;
    let inv4 = inv2 * inv2;
    let inv8 = inv4 * inv4;
    let fs = inv8 - inv8 * inv4 * inv2;
    if fs < -cap {
        (-cap, true)
    } else {
        (fs, false)
    }
}

/// Pairwise accelerations of atoms at `wrapped` positions into `acc`, summing
/// over the nearest image of every other atom. Returns the number of capped pairs.
///
/// Each pair is visited once and applied with opposite signs, so the total is
/// zero up to rounding.
pub(crate) fn accumulate_accelerations<T: Real>(
    wrapped: &[[T; 3]],
    side: T,
    guard: T,
    cap: T,
    acc: &mut [[T; 3]],
) -> usize {
    for a in acc.iter_mut() {
        *a = [T::zero(); 3];
    }
    let mut capped = 0;
    let n = wrapped.len();
    let half = side / T::of(2.0);
    // inputs lie in the cube, so each raw difference is within one side of zero
    let fold = |d: T| {
        if d > half {
            d - side
        } else if d < -half {
            d + side
        } else {
            d
        }
    };
    for i in 0..n {
        let xi = wrapped[i];
        let mut ai = [T::zero(); 3];
        for j in (i + 1)..n {
            let xj = &wrapped[j];
            let d = [fold(xj[0] - xi[0]), fold(xj[1] - xi[1]), fold(xj[2] - xi[2])];
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let (fs, hit) = pair_force_scale(r, guard, cap);
            capped += hit as usize;
            let f = [fs * d[0], fs * d[1], fs * d[2]];
            let aj = &mut acc[j];
            for k in 0..3 {
                ai[k] += f[k];
                aj[k] -= f[k];
            }
        }
        for k in 0..3 {
            acc[i][k] += ai[k];
        }
    }
    capped
}

/// Interatomic accelerations of every atom (unit mass), and the number of
/// pairs whose force hit the cap.
pub fn compute_forces<T: Real>(state: &AtomState<T>, cfg: &SimConfig<T>) -> Result<(Vec<[T; 3]>, usize)> {
    if state.positions.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("non-finite atom position".into()));
    }
    let wrapped = state.wrapped_positions(cfg.side);
    let mut acc = vec![[T::zero(); 3]; state.len()];
    let capped = accumulate_accelerations(&wrapped, cfg.side, cfg.dist_guard, cfg.force_cap, &mut acc);
    Ok((acc, capped))
}
