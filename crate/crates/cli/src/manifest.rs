//! Run manifests and atomic file output.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a sibling temporary file and a rename, so readers never see
/// a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// sha256 of the canonical JSON form of `config` without its output
    /// location, so reruns into another directory share the hash.
    pub config_hash: String,
    pub config: serde_json::Value,
    pub outputs: Vec<OutputFile>,
    pub wall_clock_seconds: f64,
    pub evaluations: u64,
}

fn strip_output_keys(v: &mut serde_json::Value) {
    if let Some(obj) = v.as_object_mut() {
        obj.remove("out");
        obj.remove("output_dir");
        obj.values_mut().for_each(strip_output_keys);
    }
}

/// Collects the files of one run and writes the manifest at the end.
pub struct Run {
    command: String,
    config: serde_json::Value,
    base: PathBuf,
    outputs: Vec<OutputFile>,
    started: Instant,
    pub evaluations: u64,
}

impl Run {
    /// Output paths are recorded relative to `base`.
    pub fn new<C: Serialize>(command: &str, config: &C, base: &Path) -> CliResult<Self> {
        let config = serde_json::to_value(config).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Run {
            command: command.to_string(),
            config,
            base: base.to_path_buf(),
            outputs: Vec::new(),
            started: Instant::now(),
            evaluations: 0,
        })
    }

    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> CliResult<()> {
        write_atomic(path, bytes)?;
        let rel = path.strip_prefix(&self.base).unwrap_or(path);
        self.outputs.push(OutputFile {
            path: rel.to_string_lossy().replace('\\', "/"),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn finish(self, manifest_path: &Path) -> CliResult<RunManifest> {
        let mut hashed = self.config.clone();
        strip_output_keys(&mut hashed);
        let canonical = serde_json::to_vec(&hashed).expect("json value serializes");
        let m = RunManifest {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            command: self.command,
            config_hash: sha256_hex(&canonical),
            config: self.config,
            outputs: self.outputs,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            evaluations: self.evaluations,
        };
        let mut text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        text.push('\n');
        write_atomic(manifest_path, text.as_bytes())?;
        Ok(m)
    }
}
