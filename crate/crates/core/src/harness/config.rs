use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cgo::H_WINDOW;
use crate::field::PotentialSpec;
use crate::{LabError, Result};

/// Environment variable naming the directory that receives run outputs.
pub const OUTPUT_ROOT_ENV: &str = "LAB_OUTPUT_ROOT";
const DEFAULT_OUTPUT_ROOT: &str = "lab-output";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Forward,
    Dn,
    CgoDecay,
    Reconstruct,
    Stability,
    BorgLevinson,
    SLimit,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Forward,
        Experiment::Dn,
        Experiment::CgoDecay,
        Experiment::Reconstruct,
        Experiment::Stability,
        Experiment::BorgLevinson,
        Experiment::SLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Forward => "forward",
            Experiment::Dn => "dn",
            Experiment::CgoDecay => "cgo-decay",
            Experiment::Reconstruct => "reconstruct",
            Experiment::Stability => "stability",
            Experiment::BorgLevinson => "borg-levinson",
            Experiment::SLimit => "s-limit",
        }
    }

    /// Largest grid the experiment accepts.
    pub fn max_n(self) -> usize {
        match self {
            Experiment::Dn | Experiment::Stability => 24,
            Experiment::BorgLevinson => 16,
            _ => 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardParams {
    /// Number of eigenpairs; defaults to the full spectrum when it fits the dense path.
    pub modes: Option<usize>,
    /// Index window `[lo, hi]` of the Weyl fit.
    pub weyl: Option<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DnParams {
    #[serde(default)]
    pub lambda: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CgoParams {
    pub k: [f64; 3],
    /// Semiclassical parameters of the sweep, converted to auxiliary magnitudes.
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructParams {
    /// Lattice radius `|k| ≤ radius`.
    pub radius: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_max_error")]
    pub max_error: f64,
}

fn default_rho() -> f64 {
    crate::inverse::DATA_ONLY_RHO
}

fn default_max_error() -> f64 {
    0.25
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityParams {
    /// Bump amplitudes of the family `(0, c·bump)`.
    pub amplitudes: Vec<f64>,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
}

fn default_sigma() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BorgLevinsonParams {
    pub lambda: f64,
    #[serde(default = "default_orders")]
    pub orders: Vec<u32>,
    #[serde(default)]
    pub mu: Vec<f64>,
    /// Number of random boundary fields in the series check.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_orders() -> Vec<u32> {
    vec![0, 1, 2, 3]
}

fn default_samples() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SLimitParams {
    pub xi: [f64; 3],
    pub k: Vec<f64>,
    #[serde(default = "default_s_gap")]
    pub max_gap: f64,
}

fn default_s_gap() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Output directory, relative to the output root unless absolute.
    pub output: Option<String>,
    #[serde(default = "PotentialSpec::zero")]
    pub potential: PotentialSpec,
    /// Second potential for comparison experiments.
    #[serde(default = "PotentialSpec::zero")]
    pub reference: PotentialSpec,
    pub forward: Option<ForwardParams>,
    pub dn: Option<DnParams>,
    pub cgo: Option<CgoParams>,
    pub reconstruct: Option<ReconstructParams>,
    pub stability: Option<StabilityParams>,
    pub borg_levinson: Option<BorgLevinsonParams>,
    pub s_limit: Option<SLimitParams>,
}

fn missing(section: &str) -> LabError {
    LabError::Config(format!("missing [{section}] table"))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            LabError::Config(m) => LabError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let e = self.experiment;
        if self.n < 4 || self.n > e.max_n() {
            return Err(LabError::Config(format!(
                "n = {} outside [4, {}] for {}",
                self.n,
                e.max_n(),
                e.name()
            )));
        }
        self.potential.validate()?;
        self.reference.validate()?;
        match e {
            Experiment::Forward | Experiment::Dn => {}
            Experiment::CgoDecay => {
                let c = self.cgo.as_ref().ok_or_else(|| missing("cgo"))?;
                if c.h.is_empty() || c.h.iter().any(|h| !(*h >= H_WINDOW.0 && *h <= H_WINDOW.1)) {
                    return Err(LabError::Config(format!(
                        "cgo.h must be non-empty within {H_WINDOW:?}"
                    )));
                }
                if c.h
                    .iter()
                    .any(|&h| h * (c.k.iter().map(|x| x * x).sum::<f64>() / 4.0).sqrt() >= 1.0)
                {
                    return Err(LabError::Config(
                        "cgo.h too large for |k|: needs h|k|/2 < 1".into(),
                    ));
                }
            }
            Experiment::Reconstruct => {
                let r = self
                    .reconstruct
                    .as_ref()
                    .ok_or_else(|| missing("reconstruct"))?;
                if !(r.radius >= 0.0) || !(r.rho > 0.0) {
                    return Err(LabError::Config(
                        "reconstruct.radius ≥ 0 and reconstruct.rho > 0 required".into(),
                    ));
                }
            }
            Experiment::Stability => {
                let s = self
                    .stability
                    .as_ref()
                    .ok_or_else(|| missing("stability"))?;
                if s.amplitudes.is_empty() || !(s.sigma > 0.0) {
                    return Err(LabError::Config(
                        "stability needs amplitudes and sigma > 0".into(),
                    ));
                }
            }
            Experiment::BorgLevinson => {
                let b = self
                    .borg_levinson
                    .as_ref()
                    .ok_or_else(|| missing("borg_levinson"))?;
                if b.orders.iter().any(|&m| m > 6) {
                    return Err(LabError::Config("borg_levinson.orders must be ≤ 6".into()));
                }
            }
            Experiment::SLimit => {
                let s = self.s_limit.as_ref().ok_or_else(|| missing("s_limit"))?;
                if s.k.is_empty() {
                    return Err(LabError::Config("s_limit.k must be non-empty".into()));
                }
            }
        }
        Ok(())
    }

    /// Output directory after resolving against `LAB_OUTPUT_ROOT`.
    pub fn output_dir(&self) -> PathBuf {
        let rel = self
            .output
            .clone()
            .unwrap_or_else(|| self.experiment.name().to_string());
        let p = PathBuf::from(&rel);
        if p.is_absolute() {
            return p;
        }
        let root = std::env::var_os(OUTPUT_ROOT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT));
        root.join(p)
    }
}
