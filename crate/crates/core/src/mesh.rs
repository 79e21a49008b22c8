//! Patch tessellation, vertex welding and edge-topology checks.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::exec::{map_range, ExecutionMode};
use crate::hermite::{PatchGeometry, Vec3};
use crate::network::SolvedNetwork;

/// Default welding distance.
pub const WELD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TessellateError {
    #[error("grid resolution must be at least 2, got {0}")]
    Resolution(usize),
    #[error("patch has degenerate tangents at every grid point")]
    NoValidNormal,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    /// Unit normals, parallel to `vertices`.
    pub normals: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriangleMesh {
    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|&[a, b, c]| {
                let (a, b, c) = (self.vertices[a], self.vertices[b], self.vertices[c]);
                (b - a).cross(&(c - a)).norm() * 0.5
            })
            .sum()
    }

    /// Concatenates meshes, offsetting indices.
    pub fn merged<'a>(meshes: impl IntoIterator<Item = &'a TriangleMesh>) -> TriangleMesh {
        let mut out = TriangleMesh::default();
        for m in meshes {
            let base = out.vertices.len();
            out.vertices.extend_from_slice(&m.vertices);
            out.normals.extend_from_slice(&m.normals);
            out.triangles
                .extend(m.triangles.iter().map(|t| t.map(|i| i + base)));
        }
        out
    }

    /// Checks index range, normal length and repeated indices.
    pub fn validate(&self) -> Result<(), String> {
        if self.normals.len() != self.vertices.len() {
            return Err(format!(
                "{} normals for {} vertices",
                self.normals.len(),
                self.vertices.len()
            ));
        }
        if let Some((i, n)) = self
            .normals
            .iter()
            .enumerate()
            .find(|(_, n)| (n.norm() - 1.0).abs() > 1e-9)
        {
            return Err(format!("normal {i} has length {}", n.norm()));
        }
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&k| k >= self.vertices.len()) {
                return Err(format!("triangle {i} index out of range"));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(format!("triangle {i} repeats a vertex"));
            }
        }
        Ok(())
    }
}

/// A grid point whose normal was borrowed from a neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalWarning {
    pub i: usize,
    pub j: usize,
    pub borrowed_from: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tessellation {
    pub mesh: TriangleMesh,
    pub warnings: Vec<NormalWarning>,
}

#[inline]
fn grid_index(n: usize, i: usize, j: usize) -> usize {
    j * (n + 1) + i
}

/// Samples the patch on a uniform `(n+1) x (n+1)` grid; vertex `(i, j)` is
/// `p(i/n, j/n)`. Triangles wind counter-clockwise seen from `p_u x p_v`.
pub fn tessellate(g: &PatchGeometry, n: usize) -> Result<Tessellation, TessellateError> {
    if n < 2 {
        return Err(TessellateError::Resolution(n));
    }
    let side = n + 1;
    let param = |k: usize| k as f64 / n as f64;
    let mut vertices = Vec::with_capacity(side * side);
    let mut normals: Vec<Option<Vec3>> = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            let (u, v) = (param(i), param(j));
            vertices.push(g.eval(u, v));
            normals.push(g.unit_normal(u, v).ok());
        }
    }

    let mut warnings = Vec::new();
    let mut filled = Vec::with_capacity(normals.len());
    for j in 0..side {
        for i in 0..side {
            match normals[grid_index(n, i, j)] {
                Some(nrm) => filled.push(nrm),
                None => {
                    let (bi, bj) =
                        nearest_valid(&normals, n, i, j).ok_or(TessellateError::NoValidNormal)?;
                    warnings.push(NormalWarning {
                        i,
                        j,
                        borrowed_from: (bi, bj),
                    });
                    filled.push(normals[grid_index(n, bi, bj)].unwrap());
                }
            }
        }
    }

    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let a = grid_index(n, i, j);
            let b = grid_index(n, i + 1, j);
            let c = grid_index(n, i + 1, j + 1);
            let d = grid_index(n, i, j + 1);
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Ok(Tessellation {
        mesh: TriangleMesh {
            vertices,
            normals: filled,
            triangles,
        },
        warnings,
    })
}

/// Closest grid point (Chebyshev rings, then Euclidean grid distance) with a
/// defined normal.
fn nearest_valid(normals: &[Option<Vec3>], n: usize, i: usize, j: usize) -> Option<(usize, usize)> {
    for r in 1..=n {
        let mut best: Option<((usize, usize), usize)> = None;
        let (i0, i1) = (i.saturating_sub(r), (i + r).min(n));
        let (j0, j1) = (j.saturating_sub(r), (j + r).min(n));
        for jj in j0..=j1 {
            for ii in i0..=i1 {
                if normals[grid_index(n, ii, jj)].is_none() {
                    continue;
                }
                let d = ii.abs_diff(i).pow(2) + jj.abs_diff(j).pow(2);
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some(((ii, jj), d));
                }
            }
        }
        if let Some((p, _)) = best {
            return Some(p);
        }
    }
    None
}

pub fn tessellate_network(
    solved: &SolvedNetwork,
    n: usize,
    mode: ExecutionMode,
) -> Result<Vec<Tessellation>, TessellateError> {
    map_range(mode, solved.patches.len(), |f| {
        tessellate(&solved.patches[f], n)
    })
    .into_iter()
    .collect()
}

/// Merges vertices closer than `tol`, averaging their normals. Triangles that
/// collapse are dropped.
pub fn weld(mesh: &TriangleMesh, tol: f64) -> TriangleMesh {
    let cell = |p: &Vec3| -> [i64; 3] { [p.x, p.y, p.z].map(|c| (c / tol).floor() as i64) };
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut remap = Vec::with_capacity(mesh.vertices.len());
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut normal_sums: Vec<Vec3> = Vec::new();
    let mut first_normals: Vec<Vec3> = Vec::new();

    for (p, nrm) in mesh.vertices.iter().zip(&mesh.normals) {
        let [cx, cy, cz] = cell(p);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = grid.get(&[cx + dx, cy + dy, cz + dz]) {
                        if let Some(&k) = list.iter().find(|&&k| (vertices[k] - p).norm() <= tol) {
                            found = Some(k);
                            break 'search;
                        }
                    }
                }
            }
        }
        let k = match found {
            Some(k) => {
                normal_sums[k] += nrm;
                k
            }
            None => {
                let k = vertices.len();
                vertices.push(*p);
                normal_sums.push(*nrm);
                first_normals.push(*nrm);
                grid.entry([cx, cy, cz]).or_default().push(k);
                k
            }
        };
        remap.push(k);
    }

    let normals = normal_sums
        .iter()
        .zip(&first_normals)
        .map(|(s, f)| {
            let len = s.norm();
            if len > 1e-12 {
                s / len
            } else {
                *f
            }
        })
        .collect();
    let triangles = mesh
        .triangles
        .iter()
        .map(|t| t.map(|i| remap[i]))
        .filter(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
        .collect();
    TriangleMesh {
        vertices,
        normals,
        triangles,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct EdgeTopology {
    pub edges: usize,
    /// Edges used by exactly one triangle.
    pub boundary_edges: usize,
    /// Edges used by more than two triangles.
    pub non_manifold_edges: usize,
    /// Two-triangle edges traversed in the same direction by both.
    pub inconsistent_edges: usize,
}

impl EdgeTopology {
    /// Closed, manifold and consistently oriented.
    pub fn is_watertight(&self) -> bool {
        self.edges > 0
            && self.boundary_edges == 0
            && self.non_manifold_edges == 0
            && self.inconsistent_edges == 0
    }
}

pub fn edge_topology(mesh: &TriangleMesh) -> EdgeTopology {
    // (lo, hi) -> (uses, uses running lo -> hi)
    let mut counts: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let e = counts.entry((a.min(b), a.max(b))).or_default();
            e.0 += 1;
            if a < b {
                e.1 += 1;
            }
        }
    }
    let mut topo = EdgeTopology {
        edges: counts.len(),
        ..Default::default()
    };
    for &(uses, forward) in counts.values() {
        match uses {
            1 => topo.boundary_edges += 1,
            2 if forward != 1 => topo.inconsistent_edges += 1,
            2 => {}
            _ => topo.non_manifold_edges += 1,
        }
    }
    topo
}
