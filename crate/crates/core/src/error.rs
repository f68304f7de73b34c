use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("potential generation failed: {0}")]
    Generation(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("field has no boundary values")]
    MissingBoundary,
    #[error("norm {0} is not defined for this field")]
    UnsupportedNorm(String),
    #[error("spectral parameter {lambda} lies within {distance:.3e} of eigenvalue {nearest}")]
    ResolventSingular {
        lambda: String,
        nearest: f64,
        distance: f64,
    },
    #[error("iterative solver stalled after {iterations} iterations at relative residual {residual:.3e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("field is not a discrete solution (relative residual {0:.3e})")]
    NotASolution(f64),
    #[error("semiclassical parameter h = {h:.4} outside the admissible window [{lo}, {hi}]")]
    HOutOfRange { h: f64, lo: f64, hi: f64 },
    #[error("zero target frequency")]
    ZeroFrequency,
    #[error("phase singularity inside the domain: {0}")]
    DomainViolation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("data too noisy (gap {gap:.3e} >= 1/e); cutoff collapses to {rho_min:.4}")]
    DataTooNoisy { gap: f64, rho_min: f64 },
    #[error("probe under-resolved: |Re sqrt(λ)| = {0:.3} exceeds N/4 = {1:.3}")]
    UnderResolved(f64, f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<LabError>,
    },
}

impl LabError {
    pub fn in_stage(self, stage: &str) -> LabError {
        LabError::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }

    /// Stable machine-readable name of the variant (the innermost one for staged errors).
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Config(_) => "config",
            LabError::Generation(_) => "generation",
            LabError::GridMismatch(_) => "grid-mismatch",
            LabError::MissingBoundary => "missing-boundary",
            LabError::UnsupportedNorm(_) => "unsupported-norm",
            LabError::ResolventSingular { .. } => "resolvent-singular",
            LabError::NotConverged { .. } => "not-converged",
            LabError::NotASolution(_) => "not-a-solution",
            LabError::HOutOfRange { .. } => "h-out-of-range",
            LabError::ZeroFrequency => "zero-frequency",
            LabError::DomainViolation(_) => "domain-violation",
            LabError::Domain(_) => "domain",
            LabError::DataTooNoisy { .. } => "data-too-noisy",
            LabError::UnderResolved(..) => "under-resolved",
            LabError::Invalid(_) => "invalid",
            LabError::Io(_) => "io",
            LabError::Stage { source, .. } => source.kind(),
        }
    }
}
