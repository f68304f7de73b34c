//! Config-driven experiment runner with checksummed manifests.
//!
//! A run writes its CSV and binary outputs plus `manifest.json` into the output
//! directory, which is resolved against `LAB_OUTPUT_ROOT`.

mod config;
mod experiments;
mod manifest;
mod table;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub use config::{
    BorgLevinsonParams, CgoParams, DnParams, Experiment, ExperimentConfig, ForwardParams,
    ReconstructParams, SLimitParams, StabilityParams, OUTPUT_ROOT_ENV,
};
pub use experiments::{list_experiments, ExperimentInfo};
pub use manifest::{
    sha256_file, verify, Check, ErrorRecord, OutputFile, RunManifest, StageTime, VerifyReport,
    MANIFEST_FILE,
};

use crate::{LabError, Result};

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub dir: PathBuf,
}

impl RunOutcome {
    pub fn manifest_path(&self) -> PathBuf {
        self.dir.join(MANIFEST_FILE)
    }
}

fn error_record(e: &LabError) -> ErrorRecord {
    let stage = match e {
        LabError::Stage { stage, .. } => stage.clone(),
        _ => String::new(),
    };
    ErrorRecord {
        stage,
        kind: e.kind().to_string(),
        message: e.to_string(),
    }
}

/// Runs a validated config. Module errors are recorded in the manifest rather than
/// returned; `Err` means the output directory itself could not be written.
pub fn run_config(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    let canon = serde_json::to_string(cfg).map_err(|e| LabError::Invalid(e.to_string()))?;
    let config_hash = manifest::hex_digest(canon.as_bytes());
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let mut rec = experiments::Recorder::new(&dir);
    let error = experiments::execute(cfg, &mut rec)
        .err()
        .map(|e| error_record(&e));
    let manifest = RunManifest {
        experiment: cfg.experiment.name().to_string(),
        config_hash,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix,
        stages: rec.stages,
        outputs: rec.outputs,
        checks: rec.checks,
        error,
    };
    let text =
        serde_json::to_string_pretty(&manifest).map_err(|e| LabError::Invalid(e.to_string()))?;
    std::fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
    Ok(RunOutcome { manifest, dir })
}

pub fn run(config: &Path) -> Result<RunOutcome> {
    run_config(&ExperimentConfig::load(config)?)
}
