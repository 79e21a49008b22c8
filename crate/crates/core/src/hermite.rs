//! Cubic Hermite curves and bicubic Hermite patches.
//!
//! Monomial vectors are ordered `[t^3, t^2, t, 1]` and the basis functions
//! are `M_H * [t^3, t^2, t, 1]^T`. A patch coordinate is
//! `x(u, v) = u^T M_H^T X M_H v` where the 4x4 control matrix `X` holds
//!
//! ```text
//!   [ x(0,0)    x(0,1)    xv(0,0)    xv(0,1)  ]
//!   [ x(1,0)    x(1,1)    xv(1,0)    xv(1,1)  ]
//!   [ xu(0,0)   xu(0,1)   xuv(0,0)   xuv(0,1) ]
//!   [ xu(1,0)   xu(1,1)   xuv(1,0)   xuv(1,1) ]
//! ```
//!
//! Rows index the u basis, columns the v basis.

use nalgebra::{Matrix4, Vector3, Vector4};
use thiserror::Error;

use crate::projective::{cross3, HVec3};

pub type Vec3 = Vector3<f64>;

/// Relative threshold for a vanishing cross product of two tangents.
pub const TANGENT_DEGENERACY_EPS: f64 = 1e-12;

/// Hermite basis matrix; rows are the coefficients of F1..F4 on `[t^3, t^2, t, 1]`.
#[rustfmt::skip]
pub const HERMITE_MATRIX: [[f64; 4]; 4] = [
    [ 2.0, -3.0, 0.0, 1.0],
    [-2.0,  3.0, 0.0, 0.0],
    [ 1.0, -2.0, 1.0, 0.0],
    [ 1.0, -1.0, 0.0, 0.0],
];

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error(
    "degenerate tangents: |tu x tv| = {cross_norm:e} with |tu| = {tu_norm:e}, |tv| = {tv_norm:e}"
)]
pub struct DegenerateTangents {
    pub cross_norm: f64,
    pub tu_norm: f64,
    pub tv_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error(
    "patch control data contains a non-finite value at coordinate {coord}, entry ({row}, {col})"
)]
pub struct NonFiniteControl {
    pub coord: usize,
    pub row: usize,
    pub col: usize,
}

pub(crate) fn hermite_matrix() -> Matrix4<f64> {
    let m = HERMITE_MATRIX;
    Matrix4::from_fn(|r, c| m[r][c])
}

#[inline]
fn monomials(t: f64) -> Vector4<f64> {
    Vector4::new(t * t * t, t * t, t, 1.0)
}

#[inline]
fn monomials_dt(t: f64) -> Vector4<f64> {
    Vector4::new(3.0 * t * t, 2.0 * t, 1.0, 0.0)
}

/// `(F1, F2, F3, F4)(t)`: position weights for the two ends, then tangent
/// weights for the two ends.
pub fn basis_values(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        2.0 * t3 - 3.0 * t2 + 1.0,
        -2.0 * t3 + 3.0 * t2,
        t3 - 2.0 * t2 + t,
        t3 - t2,
    ]
}

/// Derivatives of the four basis functions.
pub fn basis_derivatives(t: f64) -> [f64; 4] {
    let t2 = t * t;
    [
        6.0 * t2 - 6.0 * t,
        -6.0 * t2 + 6.0 * t,
        3.0 * t2 - 4.0 * t + 1.0,
        3.0 * t2 - 2.0 * t,
    ]
}

/// Endpoints and end tangents of a cubic Hermite curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveGeometry {
    pub start: Vec3,
    pub end: Vec3,
    pub start_tangent: Vec3,
    pub end_tangent: Vec3,
}

impl CurveGeometry {
    pub fn new(start: Vec3, end: Vec3, start_tangent: Vec3, end_tangent: Vec3) -> Self {
        Self {
            start,
            end,
            start_tangent,
            end_tangent,
        }
    }

    fn combine(&self, w: [f64; 4]) -> Vec3 {
        self.start * w[0] + self.end * w[1] + self.start_tangent * w[2] + self.end_tangent * w[3]
    }

    pub fn eval(&self, t: f64) -> Vec3 {
        self.combine(basis_values(t))
    }

    pub fn derivative(&self, t: f64) -> Vec3 {
        self.combine(basis_derivatives(t))
    }

    /// Same curve traversed from `end` to `start`.
    pub fn reversed(&self) -> Self {
        Self {
            start: self.end,
            end: self.start,
            start_tangent: -self.end_tangent,
            end_tangent: -self.start_tangent,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.start, self.end, self.start_tangent, self.end_tangent]
            .iter()
            .all(|v| v.iter().all(|c| c.is_finite()))
    }
}

/// Identifies one of the four patch corners by its `(u, v)` parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct CornerCode {
    pub u: usize,
    pub v: usize,
}

impl CornerCode {
    pub const U0V0: Self = Self { u: 0, v: 0 };
    pub const U1V0: Self = Self { u: 1, v: 0 };
    pub const U1V1: Self = Self { u: 1, v: 1 };
    pub const U0V1: Self = Self { u: 0, v: 1 };

    /// Corners in face order `(0,0) -> (1,0) -> (1,1) -> (0,1)`.
    pub const FACE_ORDER: [Self; 4] = [Self::U0V0, Self::U1V0, Self::U1V1, Self::U0V1];

    pub fn params(self) -> (f64, f64) {
        (self.u as f64, self.v as f64)
    }

    /// Orientation of the face-frame derivative relative to the edge leaving
    /// this corner: `+1` at the start of the parameter range, `-1` at the end.
    pub fn u_sign(self) -> f64 {
        if self.u == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn v_sign(self) -> f64 {
        if self.v == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// One of the four boundary curves of a patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `u = 0`, parameterized by `v`.
    U0,
    /// `u = 1`, parameterized by `v`.
    U1,
    /// `v = 0`, parameterized by `u`.
    V0,
    /// `v = 1`, parameterized by `u`.
    V1,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::U0, Side::U1, Side::V0, Side::V1];

    /// Parameter point of the side at curve parameter `t`.
    pub fn param(self, t: f64) -> (f64, f64) {
        match self {
            Side::U0 => (0.0, t),
            Side::U1 => (1.0, t),
            Side::V0 => (t, 0.0),
            Side::V1 => (t, 1.0),
        }
    }

    /// Corners at curve parameter 0 and 1.
    pub fn end_corners(self) -> (CornerCode, CornerCode) {
        match self {
            Side::U0 => (CornerCode::U0V0, CornerCode::U0V1),
            Side::U1 => (CornerCode::U1V0, CornerCode::U1V1),
            Side::V0 => (CornerCode::U0V0, CornerCode::U1V0),
            Side::V1 => (CornerCode::U0V1, CornerCode::U1V1),
        }
    }
}

/// Bicubic Hermite patch: one 4x4 control matrix per coordinate plus the
/// cached monomial coefficients `M_H^T X M_H`.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchGeometry {
    control: [Matrix4<f64>; 3],
    coeffs: [Matrix4<f64>; 3],
}

impl PatchGeometry {
    pub fn new(
        x: Matrix4<f64>,
        y: Matrix4<f64>,
        z: Matrix4<f64>,
    ) -> Result<Self, NonFiniteControl> {
        let control = [x, y, z];
        for (coord, m) in control.iter().enumerate() {
            for row in 0..4 {
                for col in 0..4 {
                    if !m[(row, col)].is_finite() {
                        return Err(NonFiniteControl { coord, row, col });
                    }
                }
            }
        }
        let mh = hermite_matrix();
        let mht = mh.transpose();
        let coeffs = control.map(|m| mht * m * mh);
        Ok(Self { control, coeffs })
    }

    /// Assembles the control matrices from per-corner data indexed by
    /// [`CornerCode`]: position, `dp/du`, `dp/dv` and twist.
    pub fn from_corners(
        mut corner_data: impl FnMut(CornerCode) -> CornerBlock,
    ) -> Result<Self, NonFiniteControl> {
        let mut control = [Matrix4::zeros(); 3];
        for code in CornerCode::FACE_ORDER {
            let b = corner_data(code);
            let (a, c) = (code.u, code.v);
            for (k, m) in control.iter_mut().enumerate() {
                m[(a, c)] = b.position[k];
                m[(2 + a, c)] = b.tangent_u[k];
                m[(a, 2 + c)] = b.tangent_v[k];
                m[(2 + a, 2 + c)] = b.twist[k];
            }
        }
        let [x, y, z] = control;
        Self::new(x, y, z)
    }

    pub fn control(&self) -> &[Matrix4<f64>; 3] {
        &self.control
    }

    /// 3D value of control entry `(row, col)` across the three coordinates.
    pub fn control_vector(&self, row: usize, col: usize) -> Vec3 {
        Vec3::new(
            self.control[0][(row, col)],
            self.control[1][(row, col)],
            self.control[2][(row, col)],
        )
    }

    pub fn corner_block(&self, code: CornerCode) -> CornerBlock {
        let (a, c) = (code.u, code.v);
        CornerBlock {
            position: self.control_vector(a, c),
            tangent_u: self.control_vector(2 + a, c),
            tangent_v: self.control_vector(a, 2 + c),
            twist: self.control_vector(2 + a, 2 + c),
        }
    }

    /// Largest absolute control value; the natural length scale of the patch.
    pub fn scale(&self) -> f64 {
        self.control
            .iter()
            .flat_map(|m| m.iter())
            .fold(0.0f64, |a, &b| a.max(b.abs()))
    }

    #[inline]
    fn contract(&self, mu: &Vector4<f64>, mv: &Vector4<f64>) -> Vec3 {
        Vec3::from_fn(|k, _| mu.dot(&(self.coeffs[k] * mv)))
    }

    pub fn eval(&self, u: f64, v: f64) -> Vec3 {
        self.contract(&monomials(u), &monomials(v))
    }

    pub fn partial_u(&self, u: f64, v: f64) -> Vec3 {
        self.contract(&monomials_dt(u), &monomials(v))
    }

    pub fn partial_v(&self, u: f64, v: f64) -> Vec3 {
        self.contract(&monomials(u), &monomials_dt(v))
    }

    pub fn twist(&self, u: f64, v: f64) -> Vec3 {
        self.contract(&monomials_dt(u), &monomials_dt(v))
    }

    /// Unnormalized normal `p_u x p_v`.
    pub fn normal(&self, u: f64, v: f64) -> Result<Vec3, DegenerateTangents> {
        tangent_normal(&self.partial_u(u, v), &self.partial_v(u, v))
    }

    pub fn unit_normal(&self, u: f64, v: f64) -> Result<Vec3, DegenerateTangents> {
        self.normal(u, v).map(|n| n / n.norm())
    }

    /// Control data of a boundary curve; tangents are derivatives with
    /// respect to the side's running parameter.
    pub fn boundary_curve(&self, side: Side) -> CurveGeometry {
        let cv = |r, c| self.control_vector(r, c);
        match side {
            Side::U0 => CurveGeometry::new(cv(0, 0), cv(0, 1), cv(0, 2), cv(0, 3)),
            Side::U1 => CurveGeometry::new(cv(1, 0), cv(1, 1), cv(1, 2), cv(1, 3)),
            Side::V0 => CurveGeometry::new(cv(0, 0), cv(1, 0), cv(2, 0), cv(3, 0)),
            Side::V1 => CurveGeometry::new(cv(0, 1), cv(1, 1), cv(2, 1), cv(3, 1)),
        }
    }
}

/// Position, parametric tangents and twist at one patch corner.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CornerBlock {
    pub position: Vec3,
    pub tangent_u: Vec3,
    pub tangent_v: Vec3,
    pub twist: Vec3,
}

fn to_h(v: &Vec3) -> HVec3 {
    HVec3::new(v.x, v.y, v.z)
}

/// `tu x tv`, the null vector of the system `[tu; tv] n = 0`.
pub fn tangent_normal(tu: &Vec3, tv: &Vec3) -> Result<Vec3, DegenerateTangents> {
    let n = cross3(to_h(tu), to_h(tv)).0;
    let n = Vec3::new(n[0], n[1], n[2]);
    let (tu_norm, tv_norm) = (tu.norm(), tv.norm());
    let cross_norm = n.norm();
    if cross_norm <= TANGENT_DEGENERACY_EPS * tu_norm * tv_norm || cross_norm == 0.0 {
        return Err(DegenerateTangents {
            cross_norm,
            tu_norm,
            tv_norm,
        });
    }
    Ok(n)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Unit-square patch in `z = 0` with axis tangents and zero twists.
    pub(crate) fn planar_patch() -> PatchGeometry {
        PatchGeometry::from_corners(|c| CornerBlock {
            position: Vec3::new(c.u as f64, c.v as f64, 0.0),
            tangent_u: Vec3::x(),
            tangent_v: Vec3::y(),
            twist: Vec3::zeros(),
        })
        .unwrap()
    }

    fn sample_patch() -> PatchGeometry {
        let m = |s: f64| Matrix4::from_fn(|r, c| ((r * 4 + c) as f64 * 0.37 + s).sin() * 2.0);
        PatchGeometry::new(m(0.1), m(1.3), m(2.9)).unwrap()
    }

    #[test]
    fn basis_endpoints() {
        assert_eq!(basis_values(0.0), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(basis_values(1.0), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(basis_values(0.5), [0.5, 0.5, 0.125, -0.125]);
        assert_eq!(basis_derivatives(0.0), [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(basis_derivatives(1.0), [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn basis_matches_matrix_form() {
        let mh = hermite_matrix();
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            let direct = mh * monomials(t);
            let b = basis_values(t);
            for k in 0..4 {
                assert!((direct[k] - b[k]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn partition_of_unity() {
        for i in 0..=100 {
            let b = basis_values(i as f64 / 100.0);
            assert!((b[0] + b[1] - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn curve_examples() {
        let line = CurveGeometry::new(Vec3::zeros(), Vec3::x(), Vec3::x(), Vec3::x());
        assert_eq!(line.eval(0.5), Vec3::new(0.5, 0.0, 0.0));

        let bump = CurveGeometry::new(Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::y());
        assert_eq!(bump.eval(0.5), Vec3::new(0.5, 0.0, 0.0));
        assert_eq!(bump.eval(0.0), bump.start);
        assert_eq!(bump.derivative(0.0), bump.start_tangent);
        assert_eq!(bump.derivative(1.0), bump.end_tangent);
    }

    #[test]
    fn reversed_curve_retraces() {
        let c = CurveGeometry::new(
            Vec3::new(0.0, 1.0, 2.0),
            Vec3::new(3.0, -1.0, 0.5),
            Vec3::new(1.0, 4.0, 0.0),
            Vec3::new(-2.0, 0.5, 1.0),
        );
        let r = c.reversed();
        for i in 0..=8 {
            let t = i as f64 / 8.0;
            assert!((c.eval(t) - r.eval(1.0 - t)).norm() < 1e-14);
        }
    }

    #[test]
    fn planar_patch_reproduces_plane() {
        let g = planar_patch();
        for i in 0..=4 {
            for j in 0..=4 {
                let (u, v) = (i as f64 / 4.0, j as f64 / 4.0);
                assert!((g.eval(u, v) - Vec3::new(u, v, 0.0)).norm() < 1e-15);
                assert!((g.partial_u(u, v) - Vec3::x()).norm() < 1e-15);
                let n = g.unit_normal(u, v).unwrap();
                assert!((n - Vec3::z()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn corners_reproduce_blocks() {
        let g = sample_patch();
        for code in CornerCode::FACE_ORDER {
            let (u, v) = code.params();
            let b = g.corner_block(code);
            let tol = 1e-14 * g.scale();
            assert!((g.eval(u, v) - b.position).norm() <= tol);
            assert!((g.partial_u(u, v) - b.tangent_u).norm() <= tol);
            assert!((g.partial_v(u, v) - b.tangent_v).norm() <= tol);
            assert!((g.twist(u, v) - b.twist).norm() <= tol);
        }
        // (0,0) involves no rounding at all
        assert_eq!(g.eval(0.0, 0.0), g.control_vector(0, 0));
        assert_eq!(g.partial_u(0.0, 0.0), g.control_vector(2, 0));
    }

    #[test]
    fn boundary_curves_match_restriction() {
        let g = sample_patch();
        for side in Side::ALL {
            let c = g.boundary_curve(side);
            for i in 0..=16 {
                let t = i as f64 / 16.0;
                let (u, v) = side.param(t);
                assert!((c.eval(t) - g.eval(u, v)).norm() <= 1e-12 * g.scale());
            }
        }
        let planar = planar_patch().boundary_curve(Side::V0);
        assert_eq!(planar.start, Vec3::zeros());
        assert_eq!(planar.end, Vec3::x());
    }

    #[test]
    fn normal_degenerate() {
        assert_eq!(tangent_normal(&Vec3::x(), &Vec3::y()).unwrap(), Vec3::z());
        assert!(tangent_normal(&Vec3::x(), &(Vec3::x() * 2.0)).is_err());
        assert!(tangent_normal(&Vec3::zeros(), &Vec3::y()).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let mut x = Matrix4::zeros();
        x[(2, 3)] = f64::NAN;
        let err = PatchGeometry::new(x, Matrix4::zeros(), Matrix4::zeros()).unwrap_err();
        assert_eq!(
            err,
            NonFiniteControl {
                coord: 0,
                row: 2,
                col: 3
            }
        );
    }
}
