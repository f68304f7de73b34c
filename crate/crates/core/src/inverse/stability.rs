use serde::Serialize;

use crate::cgo::H_WINDOW;
use crate::dn::{assemble_dn, dn_gap_norm, fingerprint};
use crate::field::{build_grid, sample_potential, NormKind, Normed, PotentialSpec};
use crate::forward::assemble;
use crate::{LabError, Result, C64};

/// `1 + max_Ω |x|`.
pub const CUTOFF_C: f64 = 1.0 + 1.732_050_807_568_877_2;
/// Largest auxiliary magnitude compatible with the CGO h-window.
pub const RHO_MAX: f64 = 1.0 / H_WINDOW.0;

/// `Ψ_θ(ρ) = |ln ρ|^{-θ} + ρ`, extended by 0 at `ρ = 0`.
pub fn psi(theta: f64, rho: f64) -> Result<f64> {
    if !(theta > 0.0) || !(rho >= 0.0) || !rho.is_finite() {
        return Err(LabError::Domain(format!("psi({theta}, {rho})")));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    if rho == 1.0 {
        return Err(LabError::Domain("psi is singular at 1".into()));
    }
    Ok(rho.ln().abs().powf(-theta) + rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cutoff {
    pub rho: f64,
    /// `ρ^{-β}`
    pub smooth_term: f64,
    /// `ℵ e^{cρ}`
    pub data_term: f64,
}

impl Cutoff {
    pub fn bound(&self) -> f64 {
        self.smooth_term + self.data_term
    }
}

/// `ρ* = min(ρ_max, |ln ℵ|/(2c))` with both terms of `ρ^{-β} + ℵe^{cρ}`.
pub fn choose_cutoff(aleph: f64, c: f64, beta: f64, rho_max: f64) -> Result<Cutoff> {
    if !(aleph > 0.0) {
        return Err(LabError::Domain(format!(
            "gap must be positive, got {aleph}"
        )));
    }
    if aleph >= (-1.0f64).exp() {
        return Err(LabError::DataTooNoisy {
            gap: aleph,
            rho_min: 0.5 / c,
        });
    }
    let rho = rho_max.min(aleph.ln().abs() / (2.0 * c));
    Ok(Cutoff {
        rho,
        smooth_term: rho.powf(-beta),
        data_term: aleph * (c * rho).exp(),
    })
}

/// `β = min(1/2, σ/3)`.
pub fn beta(sigma: f64) -> f64 {
    (sigma / 3.0).min(0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub fingerprints: (String, String),
    pub aleph: f64,
    pub l2_difference: f64,
    pub sigma: f64,
    pub beta: f64,
    /// `None` when the gap is zero or too large for the cutoff rule.
    pub cutoff: Option<f64>,
    pub psi: f64,
    /// Family-wide `C = min Ψ_β(ℵ)/‖V - Ṽ‖`.
    pub c_fit: f64,
}

impl StabilityReport {
    pub fn satisfied(&self) -> bool {
        self.c_fit * self.l2_difference <= self.psi * (1.0 + 1e-12)
    }
}

/// Gap norm, potential distance and modulus for each pair on an `n`-grid, plus the
/// largest `C` with `C‖V - Ṽ‖ ≤ Ψ_β(ℵ)` over the family.
pub fn stability_experiment(
    pairs: &[(PotentialSpec, PotentialSpec)],
    sigma: f64,
    n: usize,
) -> Result<Vec<StabilityReport>> {
    if !(sigma > 0.0) {
        return Err(LabError::Invalid(format!(
            "smoothness tag must be positive, got {sigma}"
        )));
    }
    let b = beta(sigma);
    let grid = build_grid(n)?;
    let zero = C64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(pairs.len());
    for (sa, sb) in pairs {
        let va = sample_potential(sa, &grid)?;
        let vb = sample_potential(sb, &grid)?;
        let da = assemble_dn(&assemble(&va, &grid)?, zero)?;
        let db = assemble_dn(&assemble(&vb, &grid)?, zero)?;
        let aleph = dn_gap_norm(&da, &db)?;
        let l2 = va.sub(&vb)?.norm(NormKind::L2)?;
        let cutoff = choose_cutoff(aleph, CUTOFF_C, b, RHO_MAX)
            .ok()
            .map(|c| c.rho);
        out.push(StabilityReport {
            fingerprints: (fingerprint(&va), fingerprint(&vb)),
            aleph,
            l2_difference: l2,
            sigma,
            beta: b,
            cutoff,
            psi: psi(b, aleph)?,
            c_fit: 0.0,
        });
    }
    let c_fit = out
        .iter()
        .filter(|r| r.l2_difference > 0.0)
        .map(|r| r.psi / r.l2_difference)
        .fold(f64::INFINITY, f64::min);
    let c_fit = if c_fit.is_finite() { c_fit } else { 0.0 };
    for r in &mut out {
        r.c_fit = c_fit;
    }
    Ok(out)
}
