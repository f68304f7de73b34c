use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::{Grid3, ScalarField};
use crate::{LabError, Result};

/// Width of the canonical smooth test bump.
pub const BUMP_WIDTH: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 3],
    pub width: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum Law {
    Uniform { low: f64, high: f64 },
    Normal { mean: f64, std: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialKind {
    Zero,
    Constant {
        value: f64,
    },
    GaussianBumps {
        bumps: Vec<Bump>,
    },
    /// `η(x) |x - x0|^(-exponent)` with i.i.d. `η` drawn from `law`.
    RoughSample {
        seed: u64,
        #[serde(flatten)]
        law: Law,
        exponent: f64,
        #[serde(default = "centre")]
        center: [f64; 3],
    },
}

fn centre() -> [f64; 3] {
    [0.5; 3]
}

fn default_sigma() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub kind: PotentialKind,
    /// Sobolev smoothness tag, used only for the stability exponent.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
}

impl PotentialSpec {
    pub fn zero() -> Self {
        PotentialSpec {
            kind: PotentialKind::Zero,
            sigma: default_sigma(),
        }
    }

    pub fn constant(value: f64) -> Self {
        PotentialSpec {
            kind: PotentialKind::Constant { value },
            sigma: default_sigma(),
        }
    }

    pub fn gaussian(center: [f64; 3], width: f64, amplitude: f64) -> Self {
        PotentialSpec {
            kind: PotentialKind::GaussianBumps {
                bumps: vec![Bump {
                    center,
                    width,
                    amplitude,
                }],
            },
            sigma: default_sigma(),
        }
    }

    /// Centred Gaussian of width [`BUMP_WIDTH`].
    pub fn bump(amplitude: f64) -> Self {
        Self::gaussian([0.5; 3], BUMP_WIDTH, amplitude)
    }

    pub fn rough(seed: u64, law: Law, exponent: f64) -> Self {
        PotentialSpec {
            kind: PotentialKind::RoughSample {
                seed,
                law,
                exponent,
                center: centre(),
            },
            sigma: 0.0,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    /// Same spec with every sample multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let kind = match &self.kind {
            PotentialKind::Zero => PotentialKind::Zero,
            PotentialKind::Constant { value } => PotentialKind::Constant { value: value * c },
            PotentialKind::GaussianBumps { bumps } => PotentialKind::GaussianBumps {
                bumps: bumps
                    .iter()
                    .map(|b| Bump {
                        amplitude: b.amplitude * c,
                        ..*b
                    })
                    .collect(),
            },
            PotentialKind::RoughSample {
                seed,
                law,
                exponent,
                center,
            } => PotentialKind::RoughSample {
                seed: *seed,
                law: match *law {
                    Law::Uniform { low, high } => Law::Uniform {
                        low: low * c,
                        high: high * c,
                    },
                    Law::Normal { mean, std } => Law::Normal {
                        mean: mean * c,
                        std: std * c,
                    },
                },
                exponent: *exponent,
                center: *center,
            },
        };
        PotentialSpec {
            kind,
            sigma: self.sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) {
            return Err(LabError::Config("sigma must be >= 0".into()));
        }
        match &self.kind {
            PotentialKind::GaussianBumps { bumps } => {
                if bumps.iter().any(|b| !(b.width > 0.0)) {
                    return Err(LabError::Config("bump width must be > 0".into()));
                }
            }
            PotentialKind::RoughSample { exponent, law, .. } => {
                if !(0.0..2.0).contains(exponent) {
                    return Err(LabError::Config(format!(
                        "singular exponent {exponent} must lie in [0, 2)"
                    )));
                }
                match *law {
                    Law::Uniform { low, high } if !(low < high) => {
                        return Err(LabError::Config("uniform law needs low < high".into()))
                    }
                    Law::Normal { std, .. } if !(std > 0.0) => {
                        return Err(LabError::Config("normal law needs std > 0".into()))
                    }
                    _ => {}
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Real potential sampled on every node, boundary included.
pub fn sample_potential(spec: &PotentialSpec, grid: &Arc<Grid3>) -> Result<ScalarField> {
    spec.validate()?;
    let values: Vec<f64> = match &spec.kind {
        PotentialKind::Zero => vec![0.0; grid.node_count()],
        PotentialKind::Constant { value } => vec![*value; grid.node_count()],
        PotentialKind::GaussianBumps { bumps } => (0..grid.node_count())
            .map(|p| {
                let x = grid.coords(p);
                bumps
                    .iter()
                    .map(|b| {
                        let r2: f64 = (0..3).map(|a| (x[a] - b.center[a]).powi(2)).sum();
                        b.amplitude * (-r2 / (2.0 * b.width * b.width)).exp()
                    })
                    .sum()
            })
            .collect(),
        PotentialKind::RoughSample {
            seed,
            law,
            exponent,
            center,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut draw: Box<dyn FnMut(&mut ChaCha8Rng) -> f64> = match *law {
                Law::Uniform { low, high } => {
                    let d =
                        Uniform::new(low, high).map_err(|e| LabError::Generation(e.to_string()))?;
                    Box::new(move |r| d.sample(r))
                }
                Law::Normal { mean, std } => {
                    let d =
                        Normal::new(mean, std).map_err(|e| LabError::Generation(e.to_string()))?;
                    Box::new(move |r| d.sample(r))
                }
            };
            (0..grid.node_count())
                .map(|p| {
                    let x = grid.coords(p);
                    let r = (0..3)
                        .map(|a| (x[a] - center[a]).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    // singular node takes the neighbouring-node distance
                    draw(&mut rng) * r.max(grid.dx()).powf(-exponent)
                })
                .collect()
        }
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(LabError::Generation("non-finite potential sample".into()));
    }
    ScalarField::from_nodal(
        grid,
        values.into_iter().map(|v| C64::new(v, 0.0)).collect(),
        true,
    )
}

/// Pointwise clipping `T_k`: entries with modulus above `k` are replaced by `k`.
pub fn truncate(field: &ScalarField, k: f64) -> Result<ScalarField> {
    if !(k > 0.0) {
        return Err(LabError::Invalid(format!(
            "truncation level must be > 0, got {k}"
        )));
    }
    let kk = C64::new(k, 0.0);
    Ok(field.map(|z| if z.norm() > k { kk } else { z }))
}

/// Uniform random field on all nodes, for property tests and draws.
pub fn random_field(grid: &Arc<Grid3>, rng: &mut impl Rng, complex: bool) -> ScalarField {
    ScalarField::from_fn(grid, |_| {
        let re = rng.random_range(-1.0..1.0);
        let im = if complex {
            rng.random_range(-1.0..1.0)
        } else {
            0.0
        };
        C64::new(re, im)
    })
}
