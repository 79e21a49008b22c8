//! Wavefront OBJ subset: `v`, `vn` and `f a//a b//b c//c` lines.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::FormatError;
use crate::hermite::Vec3;
use crate::mesh::TriangleMesh;

/// Formats like C's `%.9g`: nine significant digits, trailing zeros dropped,
/// exponent form outside `1e-5 ..= 1e9`. Negative zero prints as `0`.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        let fixed = format!("{x:.decimals$}");
        trim_fraction(&fixed).to_owned()
    } else {
        format!("{}e{exp}", trim_fraction(mantissa))
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn push_vec(out: &mut String, tag: &str, v: &Vec3) {
    let _ = writeln!(
        out,
        "{tag} {} {} {}",
        format_sig9(v.x),
        format_sig9(v.y),
        format_sig9(v.z)
    );
}

/// Writes the meshes as consecutive vertex blocks; face indices are 1-based
/// and offset by the vertices of the preceding meshes.
pub fn write_obj<W: Write>(meshes: &[TriangleMesh], mut w: W) -> std::io::Result<()> {
    let mut out = String::new();
    let mut base = 1;
    for m in meshes {
        for v in &m.vertices {
            push_vec(&mut out, "v", v);
        }
        for n in &m.normals {
            push_vec(&mut out, "vn", n);
        }
        for t in &m.triangles {
            let [a, b, c] = t.map(|i| i + base);
            let _ = writeln!(out, "f {a}//{a} {b}//{b} {c}//{c}");
        }
        base += m.vertices.len();
    }
    w.write_all(out.as_bytes())
}

pub fn export_obj(meshes: &[TriangleMesh], path: &Path) -> Result<(), FormatError> {
    let io_err = |source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    write_obj(meshes, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Reads back the subset written by [`write_obj`] into a single mesh.
pub fn parse_obj(text: &str) -> Result<TriangleMesh, FormatError> {
    let mut mesh = TriangleMesh::default();
    for (lineno, line) in text.lines().enumerate() {
        let err = |message: String| FormatError::Parse {
            line: lineno + 1,
            column: 1,
            message,
        };
        let mut parts = line.split_whitespace();
        let Some(tag) = parts.next() else { continue };
        let rest: Vec<&str> = parts.collect();
        let vec3 = |rest: &[&str]| -> Result<Vec3, FormatError> {
            let xs = rest
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            match xs[..] {
                [x, y, z] => Ok(Vec3::new(x, y, z)),
                _ => Err(err(format!("expected 3 numbers, got {}", xs.len()))),
            }
        };
        match tag {
            "v" => mesh.vertices.push(vec3(&rest)?),
            "vn" => mesh.normals.push(vec3(&rest)?),
            "f" => {
                if rest.len() != 3 {
                    return Err(err(format!(
                        "expected a triangle, got {} indices",
                        rest.len()
                    )));
                }
                let mut tri = [0usize; 3];
                for (slot, item) in tri.iter_mut().zip(&rest) {
                    let first = item.split('/').next().unwrap_or_default();
                    let idx: usize = first.parse().map_err(|e| err(format!("{item:?}: {e}")))?;
                    if idx == 0 {
                        return Err(err("OBJ indices are 1-based".into()));
                    }
                    *slot = idx - 1;
                }
                mesh.triangles.push(tri);
            }
            "#" => {}
            other => return Err(err(format!("unsupported record {other:?}"))),
        }
    }
    Ok(mesh)
}
