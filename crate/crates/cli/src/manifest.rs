//! Run manifests written beside every output file.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    pub seeds: Vec<u64>,
    pub versions: String,
    pub wall_time: f64,
    /// Headline numbers of the run, when it has any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<Value>,
    pub outputs: Vec<PathBuf>,
}

pub fn versions() -> String {
    format!("cavity {} (cavity-core {})", env!("CARGO_PKG_VERSION"), cavity_core::VERSION)
}

/// `out.csv` -> `out.csv.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn write_beside(&self, output: &Path) -> Result<PathBuf, CliError> {
        let path = manifest_path(output);
        let mut text = serde_json::to_string_pretty(self).map_err(|e| CliError::Runtime(e.to_string()))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
