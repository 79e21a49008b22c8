//! Shape diagnostics. Reported, never asserted.

use serde::Serialize;

use crate::hermite::{CornerCode, Vec3};
use crate::mesh::TriangleMesh;
use crate::network::SolvedNetwork;

/// Radial distances from the origin compared with a target radius; relative
/// deviations are `(r - target) / target`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sphericity {
    pub target_radius: f64,
    pub min_radius: f64,
    pub max_radius: f64,
    pub min_rel_deviation: f64,
    pub max_rel_deviation: f64,
    /// Relative deviation of each patch's `p(0.5, 0.5)`.
    pub mid_face_rel_deviation: Vec<f64>,
    /// Largest `|r - target|` over the surface evaluated at patch corners.
    pub corner_abs_deviation: f64,
}

impl Sphericity {
    pub fn measure(solved: &SolvedNetwork, mesh: &TriangleMesh, target_radius: f64) -> Self {
        let rel = |r: f64| (r - target_radius) / target_radius;
        let radii = mesh.vertices.iter().map(Vec3::norm);
        let (min_radius, max_radius) = radii
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r), hi.max(r))
            });
        let mid_face_rel_deviation = solved
            .patches
            .iter()
            .map(|g| rel(g.eval(0.5, 0.5).norm()))
            .collect();
        let corner_abs_deviation = solved
            .patches
            .iter()
            .flat_map(|g| {
                CornerCode::FACE_ORDER.map(|c| {
                    let (u, v) = c.params();
                    (g.eval(u, v).norm() - target_radius).abs()
                })
            })
            .fold(0.0, f64::max);
        Self {
            target_radius,
            min_radius,
            max_radius,
            min_rel_deviation: rel(min_radius),
            max_rel_deviation: rel(max_radius),
            mid_face_rel_deviation,
            corner_abs_deviation,
        }
    }
}
