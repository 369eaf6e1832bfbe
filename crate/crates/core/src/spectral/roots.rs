use crate::error::{config_err, Error, Result};
use crate::scalar::{sq, Real};

/// Parity of a patch eigenfunction about the patch centre.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Symmetric,
    Antisymmetric,
}

/// Which factor of the characteristic function vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeBranch {
    /// `cos(kh/2) = 0` (symmetric).
    CosHalf,
    /// `sin(kh/4) = 0` (symmetric).
    SinQuarter,
    /// `sin(kh/2) = 0` (antisymmetric).
    SinHalf,
    /// The bracketed tangent-versus-parabola factor.
    Bracket,
}

/// Scale factor multiplying the `(4/kh) sin(kh/4)` term of the symmetric equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CouplingFactor {
    /// `(1 - 7r²/48)/(1 - r²/48)`, from the parabolic macroscale interpolation.
    #[default]
    Interpolated,
    /// One, as in the linearisation about decoupled patches.
    Unit,
}

/// One root of a characteristic equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeRoot<T> {
    pub k: T,
    pub kh: T,
    /// Decay rate `-K k²`.
    pub lambda: T,
    pub symmetry: Symmetry,
    pub branch: ModeBranch,
}

fn coupling<T: Real>(r: T, factor: CouplingFactor) -> T {
    match factor {
        CouplingFactor::Interpolated => {
            let r2 = sq(r);
            (T::one() - T::of(7.0) * r2 / T::of(48.0)) / (T::one() - r2 / T::of(48.0))
        }
        CouplingFactor::Unit => T::one(),
    }
}

fn symmetric_bracket<T: Real>(kh: T, c: T, mu: T) -> T {
    let q = kh / T::of(4.0);
    c * q.sin() / q + (sq(kh) / mu - T::one()) * q.cos()
}

fn antisymmetric_bracket<T: Real>(kh: T, mu: T) -> T {
    let q = kh / T::of(2.0);
    q.sin() / q + (sq(kh) / mu - T::one()) * q.cos()
}

/// `cos(kh/2) sin(kh/4) [c (4/kh) sin(kh/4) + ((kh)²/μ - 1) cos(kh/4)]`
/// with `c = (1 - 7r²/48)/(1 - r²/48)`.
pub fn symmetric_char_residual<T: Real>(k: T, h: T, r: T, mu: T) -> T {
    symmetric_char_residual_with(k, h, r, mu, CouplingFactor::Interpolated)
}

pub fn symmetric_char_residual_with<T: Real>(k: T, h: T, r: T, mu: T, factor: CouplingFactor) -> T {
    let kh = k * h;
    (kh / T::of(2.0)).cos() * (kh / T::of(4.0)).sin() * symmetric_bracket(kh, coupling(r, factor), mu)
}

/// `sin(kh/2) [(2/kh) sin(kh/2) + ((kh)²/μ - 1) cos(kh/2)]`.
pub fn antisymmetric_char_residual<T: Real>(k: T, h: T, mu: T) -> T {
    let kh = k * h;
    (kh / T::of(2.0)).sin() * antisymmetric_bracket(kh, mu)
}

pub fn characteristic_residual<T: Real>(symmetry: Symmetry, k: T, h: T, r: T, mu: T, factor: CouplingFactor) -> T {
    match symmetry {
        Symmetry::Symmetric => symmetric_char_residual_with(k, h, r, mu, factor),
        Symmetry::Antisymmetric => antisymmetric_char_residual(k, h, mu),
    }
}

/// Bisects `f` on `[a, b]` (opposite signs) until the interval stops shrinking
/// or is narrower than `tol`.
fn bisect<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T, tol: T) -> T {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = (a + b) / T::of(2.0);
        if m <= a || m >= b || b - a <= tol {
            break;
        }
        let fm = f(m);
        if fm == T::zero() {
            return m;
        }
        if (fm < T::zero()) == (fa < T::zero()) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    (a + b) / T::of(2.0)
}

/// The `count` smallest positive roots `k` of the characteristic equation.
pub fn find_mode_roots<T: Real>(symmetry: Symmetry, h: T, r: T, mu: T, diffusivity: T, count: usize) -> Result<Vec<ModeRoot<T>>> {
    find_mode_roots_with(symmetry, h, r, mu, diffusivity, count, CouplingFactor::Interpolated)
}

/// As [`find_mode_roots`] with an explicit coupling factor.
///
/// Zeros of the trigonometric prefactors are enumerated exactly; zeros of the
/// bracketed factor are located by a sign scan in steps of `π/200` in `kh`
/// followed by bisection to `|Δ(kh)| ≤ 1e-12`.
pub fn find_mode_roots_with<T: Real>(
    symmetry: Symmetry,
    h: T,
    r: T,
    mu: T,
    diffusivity: T,
    count: usize,
    factor: CouplingFactor,
) -> Result<Vec<ModeRoot<T>>> {
    if count == 0 {
        return config_err("root count must be at least one");
    }
    if !(h > T::zero()) || !(mu > T::zero()) {
        return config_err("patch half-width and control strength must be positive");
    }
    let pi = T::PI();
    let c = coupling(r, factor);
    let bracket = |kh: T| match symmetry {
        Symmetry::Symmetric => symmetric_bracket(kh, c, mu),
        Symmetry::Antisymmetric => antisymmetric_bracket(kh, mu),
    };
    let step = pi / T::of(200.0);
    let tol = T::of(1e-12);
    let chunk = T::of(20.0) * pi;
    let limit = T::of(2000.0) * pi;

    let mut found: Vec<(T, ModeBranch)> = Vec::new();
    let mut lo = step * T::of(1e-3);
    let mut f_lo = bracket(lo);
    let mut hi_total = T::zero();
    while hi_total < limit {
        let start = hi_total;
        hi_total += chunk;
        // factor roots in (start, hi_total]
        let mut m = 0usize;
        loop {
            let kh = match symmetry {
                Symmetry::Symmetric => (T::of_usize(2 * m) + T::one()) * pi,
                Symmetry::Antisymmetric => T::of_usize(2 * (m + 1)) * pi,
            };
            if kh > hi_total {
                break;
            }
            if kh > start {
                let branch = match symmetry {
                    Symmetry::Symmetric => ModeBranch::CosHalf,
                    Symmetry::Antisymmetric => ModeBranch::SinHalf,
                };
                found.push((kh, branch));
            }
            m += 1;
        }
        if symmetry == Symmetry::Symmetric {
            let mut m = 1usize;
            while T::of_usize(4 * m) * pi <= hi_total {
                let kh = T::of_usize(4 * m) * pi;
                if kh > start {
                    found.push((kh, ModeBranch::SinQuarter));
                }
                m += 1;
            }
        }
        // bracket roots
        while lo < hi_total {
            let hi = (lo + step).min(hi_total);
            let f_hi = bracket(hi);
            if f_lo == T::zero() {
                found.push((lo, ModeBranch::Bracket));
            } else if (f_lo < T::zero()) != (f_hi < T::zero()) && f_hi != T::zero() {
                found.push((bisect(&bracket, lo, hi, tol), ModeBranch::Bracket));
            }
            lo = hi;
            f_lo = f_hi;
        }
        found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        found.dedup_by(|a, b| (a.0 - b.0).abs() <= T::of(1e-9) * (T::one() + b.0));
        if found.len() >= count {
            // everything below the last scanned point is complete
            found.truncate(count);
            return Ok(found
                .into_iter()
                .map(|(kh, branch)| {
                    let k = kh / h;
                    ModeRoot { k, kh, lambda: -diffusivity * sq(k), symmetry, branch }
                })
                .collect());
        }
    }
    Err(Error::Analysis(format!(
        "found only {} of {count} {symmetry:?} roots below kh = {}",
        found.len(),
        limit
    )))
}
