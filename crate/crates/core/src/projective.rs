//! Homogeneous vectors and division-free null-space solutions.
//!
//! A homogeneous system `A x = 0` with `n - 1` independent rows in `n`
//! unknowns has a one-dimensional solution space. Its generator is the
//! generalized cross product of the rows: the vector of signed cofactors of
//! `A` expanded along a symbolic first row. No pivoting or division is
//! involved, so the result stays in homogeneous form.
//!
//! The same routine serves both sides of point/line (E2) and point/plane (E3)
//! duality: the line through two points and the intersection of two lines are
//! both `cross3`, the plane through three points and the intersection of three
//! planes are both `cross4`.

use std::ops::{Index, Neg};

use thiserror::Error;

/// Relative threshold below which a cross product is treated as zero.
pub const DEGENERACY_EPS: f64 = 1e-12;

/// Default absolute threshold on `|w|` used by [`dehomogenize`].
pub const IDEAL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ProjectiveError {
    #[error("ideal point: |w| = {w:e} is not above {eps:e}")]
    IdealPoint { w: f64, eps: f64 },
    #[error("all-zero homogeneous vector")]
    ZeroVector,
    #[error("rank-deficient system: null vector norm {norm:e} vs input scale {scale:e}")]
    Degenerate { norm: f64, scale: f64 },
}

/// Shared behaviour of fixed-size homogeneous vectors.
pub trait Homogeneous: Copy + Index<usize, Output = f64> {
    const DIM: usize;
    /// Affine coordinates after dividing out the last component.
    type Euclidean: std::fmt::Debug + PartialEq;

    fn from_fn(f: impl FnMut(usize) -> f64) -> Self;

    fn euclidean_from_fn(f: impl FnMut(usize) -> f64) -> Self::Euclidean;

    fn dot(&self, other: &Self) -> f64 {
        (0..Self::DIM).map(|i| self[i] * other[i]).sum()
    }

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    fn scale(&self, s: f64) -> Self {
        Self::from_fn(|i| self[i] * s)
    }

    fn is_zero(&self) -> bool {
        (0..Self::DIM).all(|i| self[i] == 0.0)
    }
}

/// Point of the projective plane `[x, y, w]` or line coefficients `[a, b, c]`
/// of `a x + b y + c = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct HVec3(pub [f64; 3]);

/// Point of projective space `[x, y, z, w]` or plane coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct HVec4(pub [f64; 4]);

impl HVec3 {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self([a, b, c])
    }

    /// Homogeneous representative `[x, y, 1]` of a Euclidean point.
    pub const fn point(x: f64, y: f64) -> Self {
        Self([x, y, 1.0])
    }
}

impl HVec4 {
    pub const fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        Self([x, y, z, w])
    }

    pub const fn point(x: f64, y: f64, z: f64) -> Self {
        Self([x, y, z, 1.0])
    }
}

macro_rules! impl_homogeneous {
    ($ty:ident, $n:expr) => {
        impl Homogeneous for $ty {
            const DIM: usize = $n;
            type Euclidean = [f64; $n - 1];

            fn from_fn(f: impl FnMut(usize) -> f64) -> Self {
                Self(std::array::from_fn(f))
            }

            fn euclidean_from_fn(f: impl FnMut(usize) -> f64) -> Self::Euclidean {
                std::array::from_fn(f)
            }
        }

        impl Index<usize> for $ty {
            type Output = f64;

            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }

        impl Neg for $ty {
            type Output = Self;

            fn neg(self) -> Self {
                Self(self.0.map(|c| -c))
            }
        }

        impl From<[f64; $n]> for $ty {
            fn from(v: [f64; $n]) -> Self {
                Self(v)
            }
        }
    };
}

impl_homogeneous!(HVec3, 3);
impl_homogeneous!(HVec4, 4);

/// Standard cross product. Joins two points into a line, or intersects two
/// lines into a point.
pub fn cross3(u: HVec3, v: HVec3) -> HVec3 {
    let [a0, a1, a2] = u.0;
    let [b0, b1, b2] = v.0;
    HVec3([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
}

#[inline]
fn det3(r0: [f64; 3], r1: [f64; 3], r2: [f64; 3]) -> f64 {
    r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
}

/// Generalized cross product of three 4-vectors.
///
/// Component `i` is `(-1)^i` times the 3x3 minor of `[u; v; t]` with column
/// `i` removed. The plane through three points, or dually the common point of
/// three planes.
pub fn cross4(u: HVec4, v: HVec4, t: HVec4) -> HVec4 {
    let minor = |skip: usize| {
        let pick = |r: &HVec4| -> [f64; 3] {
            let mut out = [0.0; 3];
            let mut k = 0;
            for (i, &c) in r.0.iter().enumerate() {
                if i != skip {
                    out[k] = c;
                    k += 1;
                }
            }
            out
        };
        det3(pick(&u), pick(&v), pick(&t))
    };
    HVec4([minor(0), -minor(1), minor(2), -minor(3)])
}

fn check_degenerate<H: Homogeneous>(r: H, scale: f64) -> Result<H, ProjectiveError> {
    let norm = r.norm();
    if norm <= DEGENERACY_EPS * scale || norm == 0.0 {
        Err(ProjectiveError::Degenerate { norm, scale })
    } else {
        Ok(r)
    }
}

/// Null vector of a 2x3 homogeneous system `A x = 0`.
pub fn null_space_2x3(rows: [HVec3; 2]) -> Result<HVec3, ProjectiveError> {
    let r = cross3(rows[0], rows[1]);
    check_degenerate(r, rows[0].norm() * rows[1].norm())
}

/// Null vector of a 3x4 homogeneous system `A x = 0`.
pub fn null_space_3x4(rows: [HVec4; 3]) -> Result<HVec4, ProjectiveError> {
    let r = cross4(rows[0], rows[1], rows[2]);
    check_degenerate(r, rows.iter().map(Homogeneous::norm).product())
}

/// Divides through by the last component, dropping it.
pub fn dehomogenize<H: Homogeneous>(v: H) -> Result<H::Euclidean, ProjectiveError> {
    dehomogenize_with(v, IDEAL_EPS)
}

pub fn dehomogenize_with<H: Homogeneous>(v: H, eps: f64) -> Result<H::Euclidean, ProjectiveError> {
    let w = v[H::DIM - 1];
    if w.abs() <= eps {
        return Err(ProjectiveError::IdealPoint { w, eps });
    }
    Ok(H::euclidean_from_fn(|i| v[i] / w))
}

/// Canonical representative: unit Euclidean norm, first nonzero component
/// positive.
pub fn normalize_projective<H: Homogeneous>(v: H) -> Result<H, ProjectiveError> {
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(ProjectiveError::ZeroVector);
    }
    let lead = (0..H::DIM).map(|i| v[i]).find(|&c| c != 0.0).unwrap_or(1.0);
    let d = if lead < 0.0 { -norm } else { norm };
    Ok(H::from_fn(|i| v[i] / d))
}
