//! JSON network input.
//!
//! ```json
//! {
//!   "corners": [{"position": [x, y, z], "normal": [x, y, z]}, ...],
//!   "faces": [[i0, i1, i2, i3], ...],
//!   "options": {"twist": "zero", "chord_scale": 1.0, "normal_policy": "prescribed"}
//! }
//! ```
//!
//! `normal` and all of `options` are optional. Unknown keys are rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::error::Category;

use super::FormatError;
use crate::hermite::Vec3;
use crate::network::{
    build_network, CornerRecord, NetworkOptions, NormalSource, PatchNetwork, QuadFace, TwistPolicy,
};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CornerEntry {
    position: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normal: Option<[f64; 3]>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum TwistName {
    Zero,
    Adini,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PolicyName {
    Prescribed,
    AverageCross,
    FirstSlot,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptionsEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    twist: Option<TwistName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chord_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normal_policy: Option<PolicyName>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    corners: Vec<CornerEntry>,
    faces: Vec<[usize; 4]>,
    #[serde(default)]
    options: OptionsEntry,
}

/// Parsed network file: raw corners and faces plus solve options.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkInput {
    pub corners: Vec<CornerRecord>,
    pub faces: Vec<QuadFace>,
    pub options: NetworkOptions,
}

impl NetworkInput {
    pub fn build(&self) -> Result<PatchNetwork, FormatError> {
        Ok(build_network(self.corners.clone(), self.faces.clone())?)
    }
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

pub fn parse_network_json(text: &str) -> Result<NetworkInput, FormatError> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| match e.classify() {
        Category::Data => FormatError::Schema(e.to_string()),
        _ => FormatError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    })?;

    let mut options = NetworkOptions::default();
    if let Some(t) = file.options.twist {
        options.twist = match t {
            TwistName::Zero => TwistPolicy::Zero,
            TwistName::Adini => TwistPolicy::Adini,
        };
    }
    if let Some(k) = file.options.chord_scale {
        if !(k.is_finite() && k > 0.0) {
            return Err(FormatError::Schema(format!(
                "options.chord_scale must be positive, got {k}"
            )));
        }
        options.chord_scale = k;
    }
    if let Some(p) = file.options.normal_policy {
        options.normal_source = match p {
            PolicyName::Prescribed => NormalSource::Prescribed,
            PolicyName::AverageCross => NormalSource::AverageCross,
            PolicyName::FirstSlot => NormalSource::FirstSlot,
        };
    }
    let corners = file
        .corners
        .iter()
        .map(|c| CornerRecord {
            position: vec3(c.position),
            normal: c.normal.map(vec3),
        })
        .collect();
    Ok(NetworkInput {
        corners,
        faces: file.faces,
        options,
    })
}

pub fn load_network_json(path: &Path) -> Result<NetworkInput, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_network_json(&text)
}

/// Serializes the schema fields of `input`. Options still at their default
/// are written explicitly, except the automatic normal source, which has no
/// file spelling.
pub fn to_network_json(input: &NetworkInput) -> String {
    let o = &input.options;
    let file = NetworkFile {
        corners: input
            .corners
            .iter()
            .map(|c| CornerEntry {
                position: c.position.into(),
                normal: c.normal.map(Into::into),
            })
            .collect(),
        faces: input.faces.clone(),
        options: OptionsEntry {
            twist: Some(match o.twist {
                TwistPolicy::Zero => TwistName::Zero,
                TwistPolicy::Adini => TwistName::Adini,
            }),
            chord_scale: Some(o.chord_scale),
            normal_policy: match o.normal_source {
                NormalSource::Auto => None,
                NormalSource::Prescribed => Some(PolicyName::Prescribed),
                NormalSource::AverageCross => Some(PolicyName::AverageCross),
                NormalSource::FirstSlot => Some(PolicyName::FirstSlot),
            },
        },
    };
    let mut s = serde_json::to_string_pretty(&file).expect("network serializes");
    s.push('\n');
    s
}

pub fn save_network_json(input: &NetworkInput, path: &Path) -> Result<(), FormatError> {
    fs::write(path, to_network_json(input)).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}
