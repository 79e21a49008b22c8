//! Independent reference implementations and random generators shared by the
//! integration tests. Nothing here calls into the evaluation paths it checks.

#![allow(dead_code)]

use hermite_g1::{CurveGeometry, PatchGeometry, Vec3};
use nalgebra::Matrix4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(rng: &mut impl Rng, scale: f64) -> Vec3 {
    Vec3::from_fn(|_, _| rng.random_range(-1.0..1.0) * scale)
}

/// Log-uniform magnitude in `[1e-2, 1e2]`.
pub fn random_scale(rng: &mut impl Rng) -> f64 {
    10f64.powf(rng.random_range(-2.0..2.0))
}

pub fn random_patch(rng: &mut impl Rng) -> PatchGeometry {
    let s = random_scale(rng);
    let mut m = || Matrix4::from_fn(|_, _| rng.random_range(-1.0..1.0) * s);
    let (x, y, z) = (m(), m(), m());
    PatchGeometry::new(x, y, z).unwrap()
}

pub fn random_curve(rng: &mut impl Rng) -> CurveGeometry {
    let s = random_scale(rng);
    CurveGeometry::new(
        uniform_vec(rng, s),
        uniform_vec(rng, s),
        uniform_vec(rng, s),
        uniform_vec(rng, s),
    )
}

pub fn curve_scale(c: &CurveGeometry) -> f64 {
    [c.start, c.end, c.start_tangent, c.end_tangent]
        .iter()
        .map(|v| v.amax())
        .fold(0.0, f64::max)
}

/// Hermite basis written out as the four cubic polynomials.
pub fn reference_basis(t: f64) -> [f64; 4] {
    [
        1.0 - 3.0 * t.powi(2) + 2.0 * t.powi(3),
        3.0 * t.powi(2) - 2.0 * t.powi(3),
        t - 2.0 * t.powi(2) + t.powi(3),
        -t.powi(2) + t.powi(3),
    ]
}

/// `sum_ij F_i(u) F_j(v) control_ij`, one coordinate at a time.
pub fn double_sum_eval(g: &PatchGeometry, u: f64, v: f64) -> Vec3 {
    let (fu, fv) = (reference_basis(u), reference_basis(v));
    let mut out = Vec3::zeros();
    for (k, m) in g.control().iter().enumerate() {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += fu[i] * fv[j] * m[(i, j)];
            }
        }
        out[k] = acc;
    }
    out
}

pub const FD_STEP: f64 = 1e-5;

pub fn central_difference(f: impl Fn(f64) -> Vec3, t: f64) -> Vec3 {
    (f(t + FD_STEP) - f(t - FD_STEP)) / (2.0 * FD_STEP)
}

/// `order`-th forward differences of a uniformly sampled sequence; returns the
/// largest component magnitude.
pub fn max_forward_difference(samples: &[Vec3], order: usize) -> f64 {
    let mut d = samples.to_vec();
    for _ in 0..order {
        d = d.windows(2).map(|w| w[1] - w[0]).collect();
    }
    d.iter().map(|v| v.amax()).fold(0.0, f64::max)
}

/// Null vector of an `(n-1) x n` full-rank system by Gaussian elimination
/// with partial pivoting, normalized to unit length with a positive leading
/// nonzero component.
pub fn elimination_null_vector(rows: &[Vec<f64>]) -> Vec<f64> {
    let m = rows.len();
    let n = m + 1;
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut pivot_cols = Vec::with_capacity(m);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let p = (r..m)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        if a[p][c].abs() < 1e-300 {
            continue;
        }
        a.swap(r, p);
        for i in 0..m {
            if i != r {
                let f = a[i][c] / a[r][c];
                let pivot = a[r].clone();
                for (x, p) in a[i].iter_mut().zip(&pivot).skip(c) {
                    *x -= f * p;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    assert_eq!(pivot_cols.len(), m, "system is rank deficient");
    let free = (0..n).find(|c| !pivot_cols.contains(c)).unwrap();
    let mut x = vec![0.0; n];
    x[free] = 1.0;
    for (row, &pc) in pivot_cols.iter().enumerate() {
        x[pc] = -a[row][free] / a[row][pc];
    }
    canonical(&x)
}

pub fn canonical(x: &[f64]) -> Vec<f64> {
    let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    let lead = x.iter().copied().find(|&c| c != 0.0).unwrap();
    let s = if lead < 0.0 { -norm } else { norm };
    x.iter().map(|c| c / s).collect()
}

/// Prints one acceptance line and fails the test when `pass` is false.
/// Writes to the raw stdout handle so the line survives output capture.
pub fn criterion(id: u32, name: &str, pass: bool, detail: impl std::fmt::Display) {
    use std::io::Write;
    writeln!(
        std::io::stdout().lock(),
        "ACCEPTANCE {id} [{}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    )
    .unwrap();
    assert!(pass, "acceptance criterion {id} ({name}) failed: {detail}");
}
