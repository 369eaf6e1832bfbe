//! Spatial conventions: periodic wrapping, minimum-image displacements and the
//! four-region decomposition of a patch.
//!
//! A patch of half-width `h` occupies `[-h, h)` in the macroscale direction and is
//! split into quarters of width `h/2`: the core `|x| < h/4`, the left and right
//! action regions centred at `∓h/2`, and the buffer `|x| > 3h/4` which joins the
//! two action regions through the periodic wrap.

use crate::error::{config_err, Result};
use crate::scalar::Real;

/// Wraps `x` into `[-side/2, side/2]`.
///
/// Uses round-half-away-from-zero, so `wrap(±side/2)` maps to `∓side/2`.
#[inline]
pub fn wrap<T: Real>(x: T, side: T) -> T {
    x - (x / side).round() * side
}

/// Displacement from `xi` to the nearest periodic image of `xj`.
///
/// Exactly antisymmetric in its two arguments and never larger than `side/2`
/// in magnitude.
#[inline]
pub fn min_image_displacement<T: Real>(xi: T, xj: T, side: T) -> T {
    wrap(xj - xi, side)
}

/// Per-axis minimum-image displacement in a cube.
#[inline]
pub fn min_image_displacement3<T: Real>(xi: &[T; 3], xj: &[T; 3], side: T) -> [T; 3] {
    [
        min_image_displacement(xi[0], xj[0], side),
        min_image_displacement(xi[1], xj[1], side),
        min_image_displacement(xi[2], xj[2], side),
    ]
}

/// One quarter of a patch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    Core,
    LeftAction,
    RightAction,
    Buffer,
}

impl Region {
    pub const ALL: [Region; 4] = [
        Region::LeftAction,
        Region::Core,
        Region::RightAction,
        Region::Buffer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Region::Core => "core",
            Region::LeftAction => "left",
            Region::RightAction => "right",
            Region::Buffer => "buffer",
        }
    }
}

/// Patch half-width and macroscale spacing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatchGeometry<T> {
    h: T,
    big_h: T,
}

impl<T: Real> PatchGeometry<T> {
    /// `h` is the patch half-width; `big_h` is the macroscale half-domain (single
    /// patch) or inter-patch spacing (multi-patch).
    pub fn new(h: T, big_h: T) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return config_err(format!("patch half-width must be positive, got {h}"));
        }
        if !(big_h >= h) || !big_h.is_finite() {
            return config_err(format!(
                "macroscale length {big_h} must be at least the patch half-width {h}"
            ));
        }
        Ok(Self { h, big_h })
    }

    /// Patch half-width `h`.
    pub fn half_width(&self) -> T {
        self.h
    }

    /// Periodic side `2h`.
    pub fn side(&self) -> T {
        self.h + self.h
    }

    /// Macroscale length `H`.
    pub fn macro_length(&self) -> T {
        self.big_h
    }

    /// Scale ratio `r = h/H`.
    pub fn ratio(&self) -> T {
        self.h / self.big_h
    }

    /// Half-width of each region, `h/4`.
    pub fn region_half_width(&self) -> T {
        self.h / T::of(4.0)
    }

    /// Centre of the right action region, `h/2` (the left one is at `-h/2`).
    pub fn action_center(&self) -> T {
        self.h / T::of(2.0)
    }

    /// Region containing `x`, which must already lie in `[-h, h)`.
    ///
    /// Intervals are half-open with the lower bound closed.
    pub fn classify(&self, x: T) -> Region {
        classify_region(x, self)
    }
}

/// Region containing `x ∈ [-h, h)`; see [`PatchGeometry::classify`].
pub fn classify_region<T: Real>(x: T, geom: &PatchGeometry<T>) -> Region {
    let q = geom.region_half_width();
    let three_q = q * T::of(3.0);
    if x >= -q && x < q {
        Region::Core
    } else if x >= q && x < three_q {
        Region::RightAction
    } else if x >= -three_q && x < -q {
        Region::LeftAction
    } else {
        Region::Buffer
    }
}

/// Arrangement of patches on the macroscale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MacroDomain<T> {
    /// `patches` equispaced patches between Dirichlet walls whose values act as
    /// the synonyms `U_0` and `U_{M+1}`. A single patch centred between walls at
    /// `±H` is the case `patches == 1`.
    Dirichlet { patches: usize, left: T, right: T },
    /// `patches` equispaced patches on a periodic domain of length `patches·H`.
    Periodic { patches: usize },
}

impl<T: Real> MacroDomain<T> {
    pub fn patches(&self) -> usize {
        match *self {
            MacroDomain::Dirichlet { patches, .. } | MacroDomain::Periodic { patches } => patches,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MacroDomain::Dirichlet { patches, left, right } => {
                if patches == 0 {
                    return config_err("Dirichlet domain needs at least one patch");
                }
                if !left.is_finite() || !right.is_finite() {
                    return config_err("Dirichlet boundary values must be finite");
                }
            }
            MacroDomain::Periodic { patches } => {
                if patches < 2 {
                    return config_err(format!(
                        "periodic domain needs at least two patches, got {patches}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Centre `X_j = jH` of patch `j` (1-based as in the patch numbering).
    pub fn patch_center(&self, j: usize, spacing: T) -> T {
        T::of_usize(j) * spacing
    }

    /// Length of the periodic domain, `M·H`, when periodic.
    pub fn period(&self, spacing: T) -> Option<T> {
        match *self {
            MacroDomain::Periodic { patches } => Some(T::of_usize(patches) * spacing),
            MacroDomain::Dirichlet { .. } => None,
        }
    }
}
