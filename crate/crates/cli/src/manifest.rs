//! Run manifests: everything that determines a run's outputs.
//!
//! Every output directory gets a `report.json` whose fields are the
//! manifest (command, tool version, input digest, fully resolved
//! configuration, seed) plus the run's results, all as a flat object of
//! scalars and arrays. Two runs with equal manifests write bit-identical
//! outputs.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// SHA-256 of a file's raw bytes, as `sha256:<hex>`.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes =
        fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("sha256:{:x}", hasher.finalize()))
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn to_json_bytes<T: serde::Serialize>(report: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(report)?;
    bytes.push(b'\n');
    Ok(bytes)
}
