use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{LabError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTime {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Path relative to the manifest directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    /// Data rows for CSV outputs.
    pub rows: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub stage: String,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: String,
    pub config_hash: String,
    pub version: String,
    pub started_unix: u64,
    pub stages: Vec<StageTime>,
    pub outputs: Vec<OutputFile>,
    pub checks: Vec<Check>,
    pub error: Option<ErrorRecord>,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }

    /// 0 ok, 1 failed check, 2 error.
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.checks.iter().all(|c| c.passed) {
            0
        } else {
            1
        }
    }

    pub fn output(&self, name: &str) -> Option<&OutputFile> {
        self.outputs.iter().find(|o| o.path == name)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex_digest(&fs::read(path)?))
}

pub(crate) fn describe(dir: &Path, name: &str) -> Result<OutputFile> {
    let p = dir.join(name);
    let bytes = fs::read(&p)?;
    let rows = name.ends_with(".csv").then(|| {
        bytes
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            .saturating_sub(1)
    });
    Ok(OutputFile {
        path: name.to_string(),
        sha256: hex_digest(&bytes),
        bytes: bytes.len() as u64,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checked: usize,
    /// Files missing or with a different digest.
    pub mismatched: Vec<PathBuf>,
    pub manifest_passed: bool,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.mismatched.is_empty() && self.manifest_passed
    }
}

/// Recomputes every output digest listed in a manifest.
pub fn verify(manifest_path: &Path) -> Result<VerifyReport> {
    let m = RunManifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut mismatched = Vec::new();
    for o in &m.outputs {
        let p = dir.join(&o.path);
        match sha256_file(&p) {
            Ok(d) if d == o.sha256 => {}
            _ => mismatched.push(p),
        }
    }
    Ok(VerifyReport {
        checked: m.outputs.len(),
        mismatched,
        manifest_passed: m.passed(),
    })
}
