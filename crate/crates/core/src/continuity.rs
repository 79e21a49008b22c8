//! Corner-level geometric continuity.
//!
//! At a corner shared by any number of patches there is a single normal `n`,
//! and every patch tangent leaving the corner must satisfy `n . t = 0`. The
//! normal of a single patch corner is the null vector of the 2x3 system
//! `[tu; tv] n = 0`, i.e. `tu x tv`. Solving a corner means choosing `n` and
//! projecting each seed tangent onto the plane orthogonal to it. The
//! conditions do not couple corners, so every corner is solved on its own.

use serde::Serialize;
use thiserror::Error;

use crate::hermite::{tangent_normal, CornerCode, DegenerateTangents, PatchGeometry, Side, Vec3};

/// Normalized residual bound for a solved corner.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Relative length below which a projected tangent counts as collapsed.
pub const COLLAPSE_EPS: f64 = 1e-10;

/// Tolerance on `|n| - 1` for normals supplied by the caller.
pub const UNIT_TOL: f64 = 1e-12;

/// Which tangent of a slot an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TangentDir {
    U,
    V,
}

impl std::fmt::Display for TangentDir {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TangentDir::U => "u",
            TangentDir::V => "v",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error(
    "tangent collapsed onto the normal: |projected| = {projected_norm:e}, |t| = {tangent_norm:e}"
)]
pub struct ProjectionCollapse {
    pub projected_norm: f64,
    pub tangent_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("slot {slot} (patch {patch_id}), {dir} tangent: {source}")]
    ProjectionCollapse {
        slot: usize,
        patch_id: usize,
        dir: TangentDir,
        source: ProjectionCollapse,
    },
    #[error("slot {slot} (patch {patch_id}): {source}")]
    DegenerateSlot {
        slot: usize,
        patch_id: usize,
        source: DegenerateTangents,
    },
    #[error("corner normal is undefined: {0}")]
    UndefinedNormal(String),
}

/// Tangents of one incident patch at the shared corner, expressed as the
/// patch's own `dp/du` and `dp/dv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentSlot {
    pub patch_id: usize,
    pub corner: CornerCode,
    pub tangent_u: Vec3,
    pub tangent_v: Vec3,
}

/// A corner and the tangent slots of every patch sharing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerStar {
    pub position: Vec3,
    /// Unit normal; `None` until solved.
    pub normal: Option<Vec3>,
    pub slots: Vec<TangentSlot>,
}

impl CornerStar {
    pub fn new(position: Vec3, slots: Vec<TangentSlot>) -> Self {
        Self {
            position,
            normal: None,
            slots,
        }
    }

    pub fn valence(&self) -> usize {
        self.slots.len()
    }
}

/// Where the shared corner normal comes from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum NormalPolicy {
    /// Caller-supplied normal; normalized before use.
    Prescribed(Vec3),
    /// Normal of slot 0's seed tangents.
    FromFirstSlot,
    /// Normalized sum of every slot's unit seed normal.
    #[default]
    AverageCross,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveOptions {
    pub policy: NormalPolicy,
    /// Restore each tangent's seed length after projection.
    pub rescale: bool,
}

impl SolveOptions {
    pub fn with_policy(policy: NormalPolicy) -> Self {
        Self {
            policy,
            rescale: false,
        }
    }
}

/// Unit normal of the plane spanned by two tangents.
pub fn normal_from_tangents(tu: &Vec3, tv: &Vec3) -> Result<Vec3, DegenerateTangents> {
    let n = tangent_normal(tu, tv)?;
    Ok(n / n.norm())
}

/// Orthogonal projection of `t` onto the plane with unit normal `normal`.
pub fn project_tangent(normal: &Vec3, t: &Vec3) -> Result<Vec3, ProjectionCollapse> {
    debug_assert!(
        (normal.norm() - 1.0).abs() <= UNIT_TOL,
        "normal must be unit length"
    );
    let projected = t - normal * normal.dot(t);
    let (projected_norm, tangent_norm) = (projected.norm(), t.norm());
    if projected_norm <= COLLAPSE_EPS * tangent_norm {
        return Err(ProjectionCollapse {
            projected_norm,
            tangent_norm,
        });
    }
    Ok(projected)
}

fn corner_normal(corner: &CornerStar, policy: NormalPolicy) -> Result<Vec3, SolveError> {
    let slot_normal = |i: usize, s: &TangentSlot| {
        normal_from_tangents(&s.tangent_u, &s.tangent_v).map_err(|source| {
            SolveError::DegenerateSlot {
                slot: i,
                patch_id: s.patch_id,
                source,
            }
        })
    };
    match policy {
        NormalPolicy::Prescribed(n) => {
            let len = n.norm();
            if !(len.is_finite() && len > 0.0) {
                return Err(SolveError::UndefinedNormal(format!(
                    "prescribed normal {n:?}"
                )));
            }
            Ok(n / len)
        }
        NormalPolicy::FromFirstSlot => match corner.slots.first() {
            Some(s) => slot_normal(0, s),
            None => Err(SolveError::UndefinedNormal("corner has no slots".into())),
        },
        NormalPolicy::AverageCross => {
            if corner.slots.is_empty() {
                return Err(SolveError::UndefinedNormal("corner has no slots".into()));
            }
            let mut sum = Vec3::zeros();
            for (i, s) in corner.slots.iter().enumerate() {
                sum += slot_normal(i, s)?;
            }
            let len = sum.norm();
            if len <= 1e-12 * corner.slots.len() as f64 {
                return Err(SolveError::UndefinedNormal(
                    "slot normals cancel out".into(),
                ));
            }
            Ok(sum / len)
        }
    }
}

fn project_slot_tangent(
    normal: &Vec3,
    t: &Vec3,
    rescale: bool,
    slot: usize,
    patch_id: usize,
    dir: TangentDir,
) -> Result<Vec3, SolveError> {
    let p = project_tangent(normal, t).map_err(|source| SolveError::ProjectionCollapse {
        slot,
        patch_id,
        dir,
        source,
    })?;
    Ok(if rescale {
        p * (t.norm() / p.norm())
    } else {
        p
    })
}

/// Fixes the corner normal by `options.policy` and projects every slot's
/// seed tangents onto its tangent plane.
pub fn solve_corner(corner: &CornerStar, options: SolveOptions) -> Result<CornerStar, SolveError> {
    let normal = corner_normal(corner, options.policy)?;
    let slots = corner
        .slots
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let tu = project_slot_tangent(
                &normal,
                &s.tangent_u,
                options.rescale,
                i,
                s.patch_id,
                TangentDir::U,
            )?;
            let tv = project_slot_tangent(
                &normal,
                &s.tangent_v,
                options.rescale,
                i,
                s.patch_id,
                TangentDir::V,
            )?;
            tangent_normal(&tu, &tv).map_err(|source| SolveError::DegenerateSlot {
                slot: i,
                patch_id: s.patch_id,
                source,
            })?;
            Ok(TangentSlot {
                tangent_u: tu,
                tangent_v: tv,
                ..*s
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CornerStar {
        position: corner.position,
        normal: Some(normal),
        slots,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlotResidual {
    pub patch_id: usize,
    pub residual_u: f64,
    pub residual_v: f64,
}

/// Normalized orthogonality residuals `|n . t| / |t|` of a corner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerResidualReport {
    pub slots: Vec<SlotResidual>,
    pub max_u: f64,
    pub max_v: f64,
    pub max: f64,
    /// No slots to check.
    pub vacuous: bool,
    /// The corner carries no normal; residuals are reported as infinite.
    pub unsolved: bool,
}

impl CornerResidualReport {
    pub fn passes(&self, tol: f64) -> bool {
        !self.unsolved && self.max <= tol
    }
}

fn normalized_residual(n: &Vec3, t: &Vec3) -> f64 {
    let len = t.norm();
    if len == 0.0 {
        0.0
    } else {
        n.dot(t).abs() / len
    }
}

pub fn verify_corner(corner: &CornerStar) -> CornerResidualReport {
    let Some(n) = corner.normal else {
        return CornerResidualReport {
            slots: Vec::new(),
            max_u: f64::INFINITY,
            max_v: f64::INFINITY,
            max: f64::INFINITY,
            vacuous: corner.slots.is_empty(),
            unsolved: true,
        };
    };
    let slots: Vec<_> = corner
        .slots
        .iter()
        .map(|s| SlotResidual {
            patch_id: s.patch_id,
            residual_u: normalized_residual(&n, &s.tangent_u),
            residual_v: normalized_residual(&n, &s.tangent_v),
        })
        .collect();
    let max_u = slots.iter().map(|s| s.residual_u).fold(0.0, f64::max);
    let max_v = slots.iter().map(|s| s.residual_v).fold(0.0, f64::max);
    CornerResidualReport {
        vacuous: slots.is_empty(),
        slots,
        max_u,
        max_v,
        max: max_u.max(max_v),
        unsolved: false,
    }
}

fn sample_params(samples: usize) -> impl Iterator<Item = f64> {
    let n = samples.max(2);
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

fn matched(side: Side, t: f64, reversed: bool) -> (f64, f64) {
    side.param(if reversed { 1.0 - t } else { t })
}

/// Largest distance between two boundary restrictions sampled at matched
/// parameters. With `reversed`, side `b` runs opposite to side `a`.
pub fn verify_boundary_c0(
    a: &PatchGeometry,
    side_a: Side,
    b: &PatchGeometry,
    side_b: Side,
    reversed: bool,
    samples: usize,
) -> f64 {
    sample_params(samples)
        .map(|t| {
            let (ua, va) = side_a.param(t);
            let (ub, vb) = matched(side_b, t, reversed);
            (a.eval(ua, va) - b.eval(ub, vb)).norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalDeviationReport {
    /// `(t, angle)` for every sample where both normals exist.
    pub angles: Vec<(f64, f64)>,
    /// Sample parameters where either patch had degenerate tangents.
    pub degenerate: Vec<f64>,
    pub max_angle: f64,
}

/// Angle between unit normals of two patches along a shared side.
pub fn measure_normal_deviation_along_boundary(
    a: &PatchGeometry,
    side_a: Side,
    b: &PatchGeometry,
    side_b: Side,
    reversed: bool,
    samples: usize,
) -> NormalDeviationReport {
    let mut angles = Vec::new();
    let mut degenerate = Vec::new();
    for t in sample_params(samples) {
        let (ua, va) = side_a.param(t);
        let (ub, vb) = matched(side_b, t, reversed);
        match (a.normal(ua, va), b.normal(ub, vb)) {
            (Ok(na), Ok(nb)) => {
                let angle = na.cross(&nb).norm().atan2(na.dot(&nb));
                angles.push((t, angle));
            }
            _ => degenerate.push(t),
        }
    }
    let max_angle = angles.iter().map(|&(_, a)| a).fold(0.0, f64::max);
    NormalDeviationReport {
        angles,
        degenerate,
        max_angle,
    }
}
