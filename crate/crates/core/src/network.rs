//! Quad-mesh patch networks.
//!
//! A network is a set of corner points and quad faces listing four corner
//! indices in parametric order `(0,0) -> (1,0) -> (1,1) -> (0,1)`. Solving a
//! network seeds each face-corner tangent from the adjacent edge chord,
//! enforces the shared-normal condition at every corner and assembles one
//! bicubic Hermite patch per face.
//!
//! Both faces of a shared edge derive their along-edge tangent at each end
//! from the same seed and the same corner normal, so the two boundary curves
//! carry identical control data and meet exactly.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::continuity::{
    measure_normal_deviation_along_boundary, solve_corner, verify_boundary_c0, verify_corner,
    CornerResidualReport, CornerStar, NormalPolicy, SolveError, SolveOptions, TangentSlot,
    RESIDUAL_TOL,
};
use crate::exec::{map_range, try_map_range, ExecutionMode};
use crate::hermite::{CornerBlock, CornerCode, NonFiniteControl, PatchGeometry, Side, Vec3};

/// Relative C0 tolerance for shared boundaries, scaled by the model size.
pub const C0_TOL: f64 = 1e-12;

pub type QuadFace = [usize; 4];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("face {face} references corner {index}, but there are only {corner_count} corners")]
    InvalidIndex {
        face: usize,
        index: usize,
        corner_count: usize,
    },
    #[error("face {face} repeats corner {index}")]
    DegenerateFace { face: usize, index: usize },
    #[error("edge ({0}, {1}) is shared by {2} faces")]
    NonManifoldEdge(usize, usize, usize),
    #[error("corner {corner} has a non-finite position or normal")]
    NonFiniteCorner { corner: usize },
    #[error("corner {corner}: {source}")]
    Corner { corner: usize, source: SolveError },
    #[error("face {face}: {source}")]
    Face {
        face: usize,
        source: NonFiniteControl,
    },
    #[error("chord scale must be positive and finite, got {0}")]
    ChordScale(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CornerRecord {
    pub position: Vec3,
    /// Prescribed surface normal at the corner, if any.
    pub normal: Option<Vec3>,
}

impl CornerRecord {
    pub fn new(position: Vec3) -> Self {
        Self {
            position,
            normal: None,
        }
    }

    pub fn with_normal(position: Vec3, normal: Vec3) -> Self {
        Self {
            position,
            normal: Some(normal),
        }
    }
}

/// One face's use of an edge, as a patch side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeUse {
    pub face: usize,
    pub side: Side,
    /// Global corners at side parameter 0 and 1.
    pub start: usize,
    pub end: usize,
}

impl EdgeUse {
    /// Corners in the order the face's boundary loop visits them.
    pub fn walk(&self) -> (usize, usize) {
        match self.side {
            Side::V0 | Side::U1 => (self.start, self.end),
            Side::V1 | Side::U0 => (self.end, self.start),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    /// Endpoint corners, smaller index first.
    pub corners: (usize, usize),
    pub uses: Vec<EdgeUse>,
}

impl Edge {
    pub fn is_shared(&self) -> bool {
        self.uses.len() == 2
    }

    /// Whether the two faces walk the edge in opposite directions around
    /// their boundaries, i.e. agree on the surface orientation.
    pub fn consistently_oriented(&self) -> Option<bool> {
        match self.uses.as_slice() {
            [a, b] => Some(a.walk() == (b.walk().1, b.walk().0)),
            _ => None,
        }
    }

    /// Whether the two faces parameterize the shared side in opposite
    /// directions. `None` for boundary edges.
    pub fn reversed(&self) -> Option<bool> {
        match self.uses.as_slice() {
            [a, b] => Some(a.start != b.start),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum TwistPolicy {
    #[default]
    Zero,
    Adini,
}

/// Per-network choice of the corner normal source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum NormalSource {
    /// The corner's prescribed normal when present, otherwise the average of
    /// the incident seed normals.
    #[default]
    Auto,
    /// Every corner must carry a prescribed normal.
    Prescribed,
    AverageCross,
    FirstSlot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetworkOptions {
    pub normal_source: NormalSource,
    pub twist: TwistPolicy,
    /// Seed tangent length as a multiple of the edge chord.
    pub chord_scale: f64,
    /// Restore seed tangent lengths after projection.
    pub rescale: bool,
    #[serde(skip)]
    pub mode: ExecutionMode,
}

impl Default for NetworkOptions {
    fn default() -> Self {
        Self {
            normal_source: NormalSource::Auto,
            twist: TwistPolicy::Zero,
            chord_scale: 1.0,
            rescale: false,
            mode: ExecutionMode::Sequential,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatchNetwork {
    corners: Vec<CornerRecord>,
    faces: Vec<QuadFace>,
    edges: Vec<Edge>,
    /// For each corner, the `(face, local corner)` pairs touching it.
    #[serde(skip)]
    incidence: Vec<Vec<(usize, usize)>>,
}

fn local_index(code: CornerCode) -> usize {
    CornerCode::FACE_ORDER
        .iter()
        .position(|&c| c == code)
        .expect("valid corner code")
}

/// Checks indices and edge manifoldness and derives the edge table.
pub fn build_network(
    corners: Vec<CornerRecord>,
    faces: Vec<QuadFace>,
) -> Result<PatchNetwork, NetworkError> {
    for (i, c) in corners.iter().enumerate() {
        let finite = |v: &Vec3| v.iter().all(|x| x.is_finite());
        if !finite(&c.position) || c.normal.is_some_and(|n| !finite(&n)) {
            return Err(NetworkError::NonFiniteCorner { corner: i });
        }
    }
    let mut incidence = vec![Vec::new(); corners.len()];
    let mut edge_map: BTreeMap<(usize, usize), Vec<EdgeUse>> = BTreeMap::new();
    for (f, face) in faces.iter().enumerate() {
        for (k, &idx) in face.iter().enumerate() {
            if idx >= corners.len() {
                return Err(NetworkError::InvalidIndex {
                    face: f,
                    index: idx,
                    corner_count: corners.len(),
                });
            }
            if face[..k].contains(&idx) {
                return Err(NetworkError::DegenerateFace {
                    face: f,
                    index: idx,
                });
            }
        }
        for (k, &idx) in face.iter().enumerate() {
            incidence[idx].push((f, k));
        }
        for side in [Side::V0, Side::U1, Side::V1, Side::U0] {
            let (s, e) = side.end_corners();
            let (start, end) = (face[local_index(s)], face[local_index(e)]);
            let key = (start.min(end), start.max(end));
            edge_map.entry(key).or_default().push(EdgeUse {
                face: f,
                side,
                start,
                end,
            });
        }
    }
    let mut edges = Vec::with_capacity(edge_map.len());
    for (corners, uses) in edge_map {
        if uses.len() > 2 {
            return Err(NetworkError::NonManifoldEdge(
                corners.0,
                corners.1,
                uses.len(),
            ));
        }
        edges.push(Edge { corners, uses });
    }
    Ok(PatchNetwork {
        corners,
        faces,
        edges,
        incidence,
    })
}

impl PatchNetwork {
    pub fn corners(&self) -> &[CornerRecord] {
        &self.corners
    }

    pub fn faces(&self) -> &[QuadFace] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn shared_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.is_shared())
    }

    pub fn valence(&self, corner: usize) -> usize {
        self.incidence[corner].len()
    }

    /// Diagonal of the corners' bounding box, or 1 for a point-like network.
    pub fn model_scale(&self) -> f64 {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for c in &self.corners {
            lo = lo.inf(&c.position);
            hi = hi.sup(&c.position);
        }
        let d = (hi - lo).norm();
        if d.is_finite() && d > 0.0 {
            d
        } else {
            1.0
        }
    }

    /// Seeded (unsolved) corner star: one slot per incident face, tangents
    /// along the two face edges leaving the corner, in the face's `(u, v)`
    /// frame.
    pub fn corner_star(&self, corner: usize, chord_scale: f64) -> CornerStar {
        let pos = self.corners[corner].position;
        let slots = self.incidence[corner]
            .iter()
            .map(|&(f, k)| {
                let face = &self.faces[f];
                let code = CornerCode::FACE_ORDER[k];
                let u_nbr = face[local_index(CornerCode {
                    u: 1 - code.u,
                    v: code.v,
                })];
                let v_nbr = face[local_index(CornerCode {
                    u: code.u,
                    v: 1 - code.v,
                })];
                let chord = |n: usize| (self.corners[n].position - pos) * chord_scale;
                TangentSlot {
                    patch_id: f,
                    corner: code,
                    tangent_u: chord(u_nbr) * code.u_sign(),
                    tangent_v: chord(v_nbr) * code.v_sign(),
                }
            })
            .collect();
        CornerStar::new(pos, slots)
    }

    fn corner_policy(
        &self,
        corner: usize,
        source: NormalSource,
    ) -> Result<NormalPolicy, NetworkError> {
        let prescribed = self.corners[corner].normal;
        Ok(match (source, prescribed) {
            (NormalSource::Auto, Some(n)) | (NormalSource::Prescribed, Some(n)) => {
                NormalPolicy::Prescribed(n)
            }
            (NormalSource::Auto, None) | (NormalSource::AverageCross, _) => {
                NormalPolicy::AverageCross
            }
            (NormalSource::FirstSlot, _) => NormalPolicy::FromFirstSlot,
            (NormalSource::Prescribed, None) => {
                return Err(NetworkError::Corner {
                    corner,
                    source: SolveError::UndefinedNormal("no prescribed normal".into()),
                })
            }
        })
    }

    /// Solves every corner and instantiates one patch per face.
    pub fn solve(&self, options: &NetworkOptions) -> Result<SolvedNetwork, NetworkError> {
        solve_network(self, options)
    }
}

/// Adini's twist estimate at one patch corner: the mixed partial of the
/// bilinearly blended Coons patch spanned by the four boundary curves.
/// Reads only positions and tangents.
pub fn adini_twist(g: &PatchGeometry, code: CornerCode) -> Vec3 {
    let b = |u, v| g.corner_block(CornerCode { u, v });
    let (p00, p10, p01, p11) = (
        b(0, 0).position,
        b(1, 0).position,
        b(0, 1).position,
        b(1, 1).position,
    );
    let (a, c) = (code.u, code.v);
    b(1, c).tangent_v - b(0, c).tangent_v + b(a, 1).tangent_u
        - b(a, 0).tangent_u
        - (p00 - p10 - p01 + p11)
}

/// Per-face patch from the solved corner stars.
fn assemble_face(
    net: &PatchNetwork,
    stars: &[CornerStar],
    face: usize,
    twist: TwistPolicy,
) -> Result<PatchGeometry, NetworkError> {
    let corners = net.faces[face];
    let block = |code: CornerCode| {
        let c = corners[local_index(code)];
        let slot = stars[c]
            .slots
            .iter()
            .find(|s| s.patch_id == face && s.corner == code)
            .expect("every face corner has a slot");
        CornerBlock {
            position: net.corners[c].position,
            tangent_u: slot.tangent_u,
            tangent_v: slot.tangent_v,
            twist: Vec3::zeros(),
        }
    };
    let wrap = |source| NetworkError::Face { face, source };
    let ferguson = PatchGeometry::from_corners(block).map_err(wrap)?;
    match twist {
        TwistPolicy::Zero => Ok(ferguson),
        TwistPolicy::Adini => PatchGeometry::from_corners(|code| CornerBlock {
            twist: adini_twist(&ferguson, code),
            ..ferguson.corner_block(code)
        })
        .map_err(wrap),
    }
}

pub fn solve_network(
    net: &PatchNetwork,
    options: &NetworkOptions,
) -> Result<SolvedNetwork, NetworkError> {
    let k = options.chord_scale;
    if !(k.is_finite() && k > 0.0) {
        return Err(NetworkError::ChordScale(k));
    }
    let stars = try_map_range(options.mode, net.corners.len(), |c| {
        let policy = net.corner_policy(c, options.normal_source)?;
        let star = net.corner_star(c, k);
        if star.slots.is_empty() {
            // isolated corner: nothing to constrain
            let normal = match policy {
                NormalPolicy::Prescribed(n) if n.norm() > 0.0 => Some(n.normalize()),
                _ => None,
            };
            return Ok(CornerStar { normal, ..star });
        }
        solve_corner(
            &star,
            SolveOptions {
                policy,
                rescale: options.rescale,
            },
        )
        .map_err(|source| NetworkError::Corner { corner: c, source })
    })?;
    let patches = try_map_range(options.mode, net.faces.len(), |f| {
        assemble_face(net, &stars, f, options.twist)
    })?;
    Ok(SolvedNetwork {
        network: net.clone(),
        options: *options,
        corners: stars,
        patches,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolvedNetwork {
    pub network: PatchNetwork,
    pub options: NetworkOptions,
    pub corners: Vec<CornerStar>,
    /// One patch per face, in face order.
    pub patches: Vec<PatchGeometry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerCheck {
    pub corner: usize,
    pub valence: usize,
    pub residuals: CornerResidualReport,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeCheck {
    pub corners: (usize, usize),
    pub faces: (usize, usize),
    pub reversed: bool,
    pub c0_gap: f64,
    /// Informational only.
    pub max_normal_angle: f64,
    pub degenerate_samples: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkReport {
    pub model_scale: f64,
    pub residual_tol: f64,
    pub c0_tol: f64,
    pub corners: Vec<CornerCheck>,
    pub edges: Vec<EdgeCheck>,
    pub max_corner_residual: f64,
    pub max_c0_gap: f64,
    pub max_normal_angle: f64,
    pub passed: bool,
}

impl SolvedNetwork {
    /// Corner residuals and shared-edge C0 gaps, plus the informational
    /// normal deviation along every shared edge.
    pub fn verify(&self, samples: usize, mode: ExecutionMode) -> NetworkReport {
        let net = &self.network;
        let scale = net.model_scale();
        let c0_tol = C0_TOL * scale;
        let corners: Vec<_> = self
            .corners
            .iter()
            .enumerate()
            // isolated corners carry no constraint
            .filter(|(_, s)| !s.slots.is_empty())
            .map(|(i, s)| {
                let residuals = verify_corner(s);
                CornerCheck {
                    corner: i,
                    valence: s.valence(),
                    passed: residuals.passes(RESIDUAL_TOL),
                    residuals,
                }
            })
            .collect();
        let shared: Vec<&Edge> = net.shared_edges().collect();
        let edges = map_range(mode, shared.len(), |i| {
            let e = shared[i];
            let (a, b) = (e.uses[0], e.uses[1]);
            let reversed = e.reversed().unwrap_or(false);
            let (pa, pb) = (&self.patches[a.face], &self.patches[b.face]);
            let c0_gap = verify_boundary_c0(pa, a.side, pb, b.side, reversed, samples);
            let dev =
                measure_normal_deviation_along_boundary(pa, a.side, pb, b.side, reversed, samples);
            EdgeCheck {
                corners: e.corners,
                faces: (a.face, b.face),
                reversed,
                c0_gap,
                max_normal_angle: dev.max_angle,
                degenerate_samples: dev.degenerate.len(),
                passed: c0_gap <= c0_tol,
            }
        });
        let max_corner_residual = corners.iter().map(|c| c.residuals.max).fold(0.0, f64::max);
        let max_c0_gap = edges.iter().map(|e| e.c0_gap).fold(0.0, f64::max);
        let max_normal_angle = edges.iter().map(|e| e.max_normal_angle).fold(0.0, f64::max);
        let passed = corners.iter().all(|c| c.passed) && edges.iter().all(|e| e.passed);
        NetworkReport {
            model_scale: scale,
            residual_tol: RESIDUAL_TOL,
            c0_tol,
            corners,
            edges,
            max_corner_residual,
            max_c0_gap,
            max_normal_angle,
            passed,
        }
    }
}

/// Cube with corners at `(+-1, +-1, +-1) * scale`, faces oriented so that
/// `p_u x p_v` points outward, and each corner's prescribed normal set to
/// its radial direction. Every corner has valence 3.
pub fn demo_cube(scale: f64) -> PatchNetwork {
    assert!(
        scale > 0.0 && scale.is_finite(),
        "cube scale must be positive"
    );
    let corners = (0..8)
        .map(|i| {
            let bit = |b: usize| if i & (1 << b) != 0 { 1.0 } else { -1.0 };
            let p = Vec3::new(bit(0), bit(1), bit(2));
            CornerRecord::with_normal(p * scale, p / 3f64.sqrt())
        })
        .collect();
    let faces = vec![
        [0, 2, 3, 1],
        [4, 5, 7, 6],
        [0, 1, 5, 4],
        [2, 6, 7, 3],
        [0, 4, 6, 2],
        [1, 3, 7, 5],
    ];
    build_network(corners, faces).expect("cube topology is valid")
}
