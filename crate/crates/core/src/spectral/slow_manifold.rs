//! Numerical slow-manifold construction for the multi-patch controlled
//! advection-diffusion PDE, first order in the coupling `γ` and the advection
//! speed `α`.
//!
//! Within patch `j`, with `ξ = (x - X_j)/H`, the field is sought as
//! `u = Σ_m U_{j+m} v_m(ξ)` over `m ∈ {-1, 0, 1}` and the evolution as
//! `dU_j/dt = Σ_m G_m U_{j+m}`. Each `v_m` is expanded in powers `γ^a α^b`
//! (`a, b ≤ 1`); every term is a quartic on each of the four regions
//! `left [-3r/4, -r/4]`, `core [-r/4, r/4]`, `right [r/4, 3r/4]` and
//! `buffer [3r/4, 5r/4]`, the buffer wrapping onto the left edge. Each order is
//! fixed by the PDE residual on every region, C⁰ and C¹ continuity at the
//! four interfaces, and the amplitude condition on the core mean, solved in
//! the least-squares sense with an SVD.

use nalgebra::{DMatrix, DVector, RealField};
use num_traits::Float;

use crate::error::{config_err, Error, Result};
use crate::geometry::Region;
use crate::scalar::Real;

/// Number of polynomial coefficients per region (degree 4 in `ξ`).
pub const DEG: usize = 5;
const UNKNOWNS: usize = 4 * DEG + 1;
const EQUATIONS: usize = 4 * DEG + 8 + 1;

/// Power of `γ` and of `α` carried by one term of the expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrderTag {
    pub gamma: u32,
    pub alpha: u32,
}

/// Orders retained by the truncation, in solve order.
pub const ORDERS: [OrderTag; 4] = [
    OrderTag { gamma: 0, alpha: 0 },
    OrderTag { gamma: 1, alpha: 0 },
    OrderTag { gamma: 0, alpha: 1 },
    OrderTag { gamma: 1, alpha: 1 },
];

/// Piecewise-quartic basis fields `v_m(ξ)`, one coefficient set per region,
/// neighbour offset `m` and order. Coefficients multiply `ξ^p` in absolute `ξ`,
/// and the `α` terms are per unit `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseField<T> {
    pub r: T,
    terms: Vec<(OrderTag, i32, [[T; DEG]; 4])>,
}

fn region_index(region: Region) -> usize {
    match region {
        Region::LeftAction => 0,
        Region::Core => 1,
        Region::RightAction => 2,
        Region::Buffer => 3,
    }
}

fn horner<T: Real>(c: &[T], x: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &a| acc * x + a)
}

fn derivative<T: Real>(c: &[T; DEG]) -> [T; DEG] {
    let mut d = [T::zero(); DEG];
    for p in 1..DEG {
        d[p - 1] = T::of_usize(p) * c[p];
    }
    d
}

/// Mean of `ξ^p` over `[a, b]`.
fn power_mean<T: Real>(p: usize, a: T, b: T) -> T {
    let q = p as i32 + 1;
    (Float::powi(b, q) - Float::powi(a, q)) / (T::of_usize(p + 1) * (b - a))
}

impl<T: Real> PiecewiseField<T> {
    /// Coefficients of `ξ^0..ξ^4` for one term, if present.
    pub fn coefficients(&self, order: OrderTag, neighbor: i32, region: Region) -> Option<[T; DEG]> {
        self.terms
            .iter()
            .find(|(o, m, _)| *o == order && *m == neighbor)
            .map(|(_, _, c)| c[region_index(region)])
    }

    /// Every stored term as `(order, neighbour, coefficients per region)`, with
    /// regions ordered left action, core, right action, buffer.
    pub fn terms(&self) -> impl Iterator<Item = (OrderTag, i32, &[[T; DEG]; 4])> + '_ {
        self.terms.iter().map(|(o, m, c)| (*o, *m, c))
    }

    /// Region interval in `ξ`, as used by the stored polynomials.
    pub fn region_interval(&self, region: Region) -> (T, T) {
        let q = self.r / T::of(4.0);
        match region {
            Region::LeftAction => (-T::of(3.0) * q, -q),
            Region::Core => (-q, q),
            Region::RightAction => (q, T::of(3.0) * q),
            Region::Buffer => (T::of(3.0) * q, T::of(5.0) * q),
        }
    }

    /// Region containing `ξ` after wrapping into `[-3r/4, 5r/4)`.
    pub fn locate(&self, xi: T) -> (Region, T) {
        let period = self.r + self.r;
        let lo = -T::of(0.75) * self.r;
        let x = lo + (xi - lo) - Float::floor((xi - lo) / period) * period;
        let q = self.r / T::of(4.0);
        let region = if x < -q {
            Region::LeftAction
        } else if x < q {
            Region::Core
        } else if x < T::of(3.0) * q {
            Region::RightAction
        } else {
            Region::Buffer
        };
        (region, x)
    }

    /// Basis field `v_m(ξ)` summed over orders at the given `γ` and `α`.
    pub fn evaluate(&self, neighbor: i32, xi: T, gamma: T, alpha: T) -> T {
        let (region, x) = self.locate(xi);
        let ri = region_index(region);
        self.terms
            .iter()
            .filter(|(_, m, _)| *m == neighbor)
            .map(|(o, _, c)| Float::powi(gamma, o.gamma as i32) * Float::powi(alpha, o.alpha as i32) * horner(&c[ri], x))
            .sum()
    }
}

/// Coefficients of the emergent three-point model
/// `dU_j/dt = -a_adv (U_{j+1} - U_{j-1}) + a_diff (U_{j-1} - 2U_j + U_{j+1})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StencilModel<T> {
    pub a_adv: T,
    pub a_diff: T,
    /// `a_adv / α`.
    pub advection_per_unit_alpha: T,
    /// `a_diff / K`.
    pub diffusion_per_unit_k: T,
}

impl<T: Real> StencilModel<T> {
    /// The closed-form coefficients `15α/(8H(1+48/μ)(1+12/μ))` and
    /// `3K/(H²(1+48/μ))`. An infinite `μ` gives the strong-control limit.
    pub fn closed_form(alpha: T, diffusivity: T, mu: T, big_h: T) -> Self {
        let p48 = T::one() + T::of(48.0) / mu;
        let p12 = T::one() + T::of(12.0) / mu;
        let adv = T::of(15.0) / (T::of(8.0) * big_h * p48 * p12);
        let diff = T::of(3.0) / (big_h * big_h * p48);
        Self {
            a_adv: alpha * adv,
            a_diff: diffusivity * diff,
            advection_per_unit_alpha: adv,
            diffusion_per_unit_k: diff,
        }
    }

    /// Multipliers of `(U_{j-1}, U_j, U_{j+1})` in `dU_j/dt`.
    pub fn weights(&self) -> [T; 3] {
        [self.a_diff + self.a_adv, -T::of(2.0) * self.a_diff, self.a_diff - self.a_adv]
    }
}

/// `(advection, diffusion)` coefficients of the equivalent PDE
/// `U_t = -A α U_x + D K U_xx`: `A = 2H·a_adv/α`, `D = H²·a_diff/K`.
pub fn equivalent_pde<T: Real>(model: &StencilModel<T>, big_h: T) -> (T, T) {
    (
        (big_h + big_h) * model.advection_per_unit_alpha,
        big_h * big_h * model.diffusion_per_unit_k,
    )
}

/// Result of [`construct_slow_manifold`].
#[derive(Clone, Debug)]
pub struct SlowManifold<T> {
    pub field: PiecewiseField<T>,
    pub stencil: StencilModel<T>,
    /// `G_m` per order for `m = -1, 0, 1`.
    pub evolution: Vec<(OrderTag, [T; 3])>,
    /// Largest singular-value ratio met while solving.
    pub condition: T,
    /// Passes made, the last of which found no residual.
    pub iterations: usize,
}

struct Problem<T> {
    q: T,
    kappa: T,
    gain: T,
    r: T,
    big_h: T,
}

impl<T: Real + RealField> Problem<T> {
    fn interval(&self, ri: usize) -> (T, T) {
        let q = self.q;
        let three = T::of(3.0);
        match ri {
            0 => (-three * q, -q),
            1 => (-q, q),
            2 => (q, three * q),
            _ => (three * q, T::of(5.0) * q),
        }
    }

    /// Linear operator acting on the quartic coefficients and `G`.
    fn matrix(&self) -> DMatrix<T> {
        let mut a = DMatrix::<T>::zeros(EQUATIONS, UNKNOWNS);
        let g = UNKNOWNS - 1;
        for ri in 0..4 {
            let row0 = ri * DEG;
            a[(row0, g)] = -T::one();
            for p in 0..DEG - 2 {
                a[(row0 + p, ri * DEG + p + 2)] += self.kappa * T::of_usize((p + 2) * (p + 1));
            }
            if ri == 0 || ri == 2 {
                let (lo, hi) = self.interval(ri);
                for p in 0..DEG {
                    a[(row0, ri * DEG + p)] -= self.gain * power_mean(p, lo, hi);
                }
            }
        }
        // continuity: (left region, right region, point in left coords, point in right coords)
        let q = self.q;
        let three = T::of(3.0);
        let joins = [(0, 1, -q, -q), (1, 2, q, q), (2, 3, three * q, three * q), (3, 0, T::of(5.0) * q, -three * q)];
        let mut row = 4 * DEG;
        for (ra, rb, xa, xb) in joins {
            for p in 0..DEG {
                a[(row, ra * DEG + p)] += Float::powi(xa, p as i32);
                a[(row, rb * DEG + p)] -= Float::powi(xb, p as i32);
                if p > 0 {
                    a[(row + 1, ra * DEG + p)] += T::of_usize(p) * Float::powi(xa, p as i32 - 1);
                    a[(row + 1, rb * DEG + p)] -= T::of_usize(p) * Float::powi(xb, p as i32 - 1);
                }
            }
            row += 2;
        }
        for p in 0..DEG {
            a[(row, DEG + p)] = power_mean(p, -q, q);
        }
        a
    }

    /// Change `ΔI^∓` of the action targets per unit `U_{j+m}` at first order in `γ`.
    fn target_shift(&self, m: i32) -> (T, T) {
        let r = self.r;
        let odd = r / T::of(4.0);
        let even = r * r / T::of(8.0);
        match m {
            1 => (-odd + even, odd + even),
            -1 => (odd + even, -odd + even),
            _ => (-(even + even), -(even + even)),
        }
    }
}

/// Builds the slow manifold of the multi-patch scheme and extracts the
/// three-point evolution stencil.
///
/// The field slots at `γ^0`, `γ^1`, `α` and `γα` are solved in turn, each
/// forced by the lower ones; a final pass confirms every residual vanishes.
pub fn construct_slow_manifold<T: Real + RealField>(
    alpha: T,
    diffusivity: T,
    mu: T,
    r: T,
    big_h: T,
) -> Result<SlowManifold<T>> {
    if !(mu > T::zero()) || !(r > T::zero() && r <= T::one()) {
        return config_err(format!("need μ > 0 and 0 < r ≤ 1, got μ = {mu}, r = {r}"));
    }
    if !(diffusivity > T::zero()) || !(big_h > T::zero()) {
        return config_err("diffusivity and macroscale spacing must be positive");
    }
    let prob = Problem {
        q: r / T::of(4.0),
        kappa: diffusivity / (big_h * big_h),
        gain: diffusivity * mu / (r * r * big_h * big_h),
        r,
        big_h,
    };
    let a = prob.matrix();
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = smax / smin;
    let rank = sv.iter().filter(|&&s| s > smax * T::of(1e-12)).count();
    if rank < UNKNOWNS {
        return Err(Error::Construction {
            reason: format!("rank {rank} of {UNKNOWNS}"),
            condition: condition.to_f64_lossy(),
        });
    }

    let mut terms: Vec<(OrderTag, i32, [[T; DEG]; 4])> = Vec::new();
    let mut evolution = Vec::new();
    let lookup = |terms: &[(OrderTag, i32, [[T; DEG]; 4])], o: OrderTag, m: i32| {
        terms.iter().find(|(t, n, _)| *t == o && *n == m).map(|(_, _, c)| *c)
    };

    for order in ORDERS {
        let mut gs = [T::zero(); 3];
        for (slot, m) in [-1i32, 0, 1].into_iter().enumerate() {
            let mut b = DVector::<T>::zeros(EQUATIONS);
            if order.gamma == 1 && order.alpha == 0 {
                let (dm, dp) = prob.target_shift(m);
                b[0] = -prob.gain * dm;
                b[2 * DEG] = -prob.gain * dp;
            }
            if order.alpha == 1 {
                let lower = OrderTag { gamma: order.gamma, alpha: 0 };
                if let Some(c) = lookup(&terms, lower, m) {
                    for ri in 0..4 {
                        let d = derivative(&c[ri]);
                        for p in 0..DEG {
                            // residual gains -(1/H) u'; move it to the right-hand side
                            b[ri * DEG + p] += d[p] / prob.big_h;
                        }
                    }
                }
            }
            if order.gamma == 0 && order.alpha == 0 && m == 0 {
                // uncoupled targets are the patch's own amplitude
                b[0] = -prob.gain;
                b[2 * DEG] = -prob.gain;
                b[EQUATIONS - 1] = T::one();
            }
            let x = svd
                .solve(&b, T::of(1e-14) * smax)
                .map_err(|e| Error::Construction { reason: e.to_string(), condition: condition.to_f64_lossy() })?;
            let resid = (&a * &x - &b).amax();
            if resid > T::of(1e-9) * (T::one() + b.amax()) {
                return Err(Error::Construction {
                    reason: format!("inconsistent equations at order {order:?} (residual {resid})"),
                    condition: condition.to_f64_lossy(),
                });
            }
            let mut c = [[T::zero(); DEG]; 4];
            for ri in 0..4 {
                for p in 0..DEG {
                    c[ri][p] = x[ri * DEG + p];
                }
            }
            gs[slot] = x[UNKNOWNS - 1];
            terms.push((order, m, c));
        }
        evolution.push((order, gs));
    }

    let g_of = |o: OrderTag| evolution.iter().find(|(t, _)| *t == o).map(|(_, g)| *g).unwrap_or([T::zero(); 3]);
    let g1 = g_of(ORDERS[1]);
    let ga = g_of(ORDERS[3]);
    let a_diff = g1[2];
    let adv = (ga[0] - ga[2]) / T::of(2.0);
    let stencil = StencilModel {
        a_adv: alpha * adv,
        a_diff,
        advection_per_unit_alpha: adv,
        diffusion_per_unit_k: a_diff / diffusivity,
    };
    Ok(SlowManifold {
        field: PiecewiseField { r, terms },
        stencil,
        evolution,
        condition,
        iterations: ORDERS.len() + 1,
    })
}
