//! File formats: JSON network input and Wavefront OBJ output.

mod json;
mod obj;

pub use json::{
    load_network_json, parse_network_json, save_network_json, to_network_json, NetworkInput,
};
pub use obj::{export_obj, format_sig9, parse_obj, write_obj};

use std::path::PathBuf;

use thiserror::Error;

use crate::network::NetworkError;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}
