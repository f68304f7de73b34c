use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::cgo::PHASE_CENTER;
use crate::dn::{assemble_dn, BoundaryGram, DnMap, MatrixFreeDn};
use crate::field::{fourier_mode, BoundaryField, Grid3};
use crate::forward::DiscreteOperator;
use crate::{LabError, Result};

/// Smoothing margin of the large-μ norm.
pub const MU_EPSILON: f64 = 0.2;

/// `‖Λ_A(-μ²) - Λ_B(-μ²)‖` from `H^{1/2}` into `H^{-1/2-ε}` for each `μ`.
pub fn large_mu_gap(
    a: &DiscreteOperator,
    b: &DiscreteOperator,
    mus: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if mus.iter().any(|&m| !(m >= 2.0)) || mus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::Invalid(
            "μ values must be ≥ 2 and ascending".into(),
        ));
    }
    let gram = BoundaryGram::of(a.grid())?;
    mus.iter()
        .map(|&mu| {
            let lam = C64::new(-mu * mu, 0.0);
            let da = assemble_dn(a, lam)?;
            let db = assemble_dn(b, lam)?;
            Ok((mu, gram.gap(&da, &db, -0.5 - MU_EPSILON)?))
        })
        .collect()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Boundary exponential `e^{i√λ (x - x_c)·ω}`, principal square root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentialProbe {
    pub lambda: C64,
    pub sqrt_lambda: C64,
    pub omega: [f64; 3],
}

impl ExponentialProbe {
    pub fn new(lambda: C64, omega: [f64; 3]) -> Self {
        ExponentialProbe {
            lambda,
            sqrt_lambda: lambda.sqrt(),
            omega,
        }
    }

    pub fn value(&self, x: [f64; 3]) -> C64 {
        let y = [
            x[0] - PHASE_CENTER[0],
            x[1] - PHASE_CENTER[1],
            x[2] - PHASE_CENTER[2],
        ];
        (C64::i() * self.sqrt_lambda * dot(y, self.omega)).exp()
    }

    pub fn trace(&self, grid: &Arc<Grid3>) -> BoundaryField {
        BoundaryField::from_fn(grid, |x| self.value(x))
    }

    /// Real growth rate of the probe.
    pub fn growth(&self) -> [f64; 3] {
        self.omega.map(|w| -self.sqrt_lambda.im * w)
    }
}

fn check_probe(grid: &Grid3, lambda: C64) -> Result<()> {
    if lambda.im == 0.0 && lambda.re >= 0.0 {
        return Err(LabError::Domain(format!(
            "λ = {lambda} lies on the branch cut"
        )));
    }
    let re = lambda.sqrt().re.abs();
    let limit = grid.n() as f64 / 4.0;
    if re > limit {
        return Err(LabError::UnderResolved(re, limit));
    }
    Ok(())
}

/// `𝓢(λ, θ, ω) = ∫_Γ Λ(λ) 𝔢_{ω} · 𝔢_{-θ}` through an arbitrary DN map.
pub fn s_functional_with(dn: &dyn DnMap, theta: [f64; 3], omega: [f64; 3]) -> Result<C64> {
    let lambda = dn.lambda();
    check_probe(dn.grid(), lambda)?;
    let e = ExponentialProbe::new(lambda, omega);
    let t = ExponentialProbe::new(lambda, theta.map(|x| -x));
    let g = dn.apply_weighted(&e.trace(dn.grid()), e.growth())?;
    Ok(g.pair(&t.trace(dn.grid())))
}

pub fn s_functional(
    op: &Arc<DiscreteOperator>,
    lambda: C64,
    theta: [f64; 3],
    omega: [f64; 3],
) -> Result<C64> {
    check_probe(op.grid(), lambda)?;
    s_functional_with(&MatrixFreeDn::new(op.clone(), lambda)?, theta, omega)
}

/// `-(λ/2)|θ - ω|² ∫ e^{-i√λ (θ-ω)·(x - x_c)}` by trapezoid quadrature.
pub fn s_free(grid: &Arc<Grid3>, lambda: C64, theta: [f64; 3], omega: [f64; 3]) -> C64 {
    let s = lambda.sqrt();
    let d = [
        theta[0] - omega[0],
        theta[1] - omega[1],
        theta[2] - omega[2],
    ];
    let mut integral = C64::new(0.0, 0.0);
    for p in 0..grid.node_count() {
        let x = grid.coords(p);
        let y = [
            x[0] - PHASE_CENTER[0],
            x[1] - PHASE_CENTER[1],
            x[2] - PHASE_CENTER[2],
        ];
        integral += (-C64::i() * s * dot(d, y)).exp() * grid.volume_weight(p);
    }
    -lambda / 2.0 * dot(d, d) * integral
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SLimitPoint {
    pub k: f64,
    pub theta: [f64; 3],
    pub omega: [f64; 3],
    pub difference: C64,
    pub target: C64,
}

impl SLimitPoint {
    pub fn gap(&self) -> f64 {
        (self.difference - self.target).norm()
    }
}

/// `θ_k = c_k η + ξ/(2k)`, `ω_k = c_k η - ξ/(2k)` with `c_k = (1 - |ξ|²/(4k²))^{1/2}`.
pub fn s_sequence(xi: [f64; 3], eta: [f64; 3], k: f64) -> Result<([f64; 3], [f64; 3])> {
    let c2 = 1.0 - dot(xi, xi) / (4.0 * k * k);
    if !(c2 >= 0.0) {
        return Err(LabError::Domain(format!(
            "k = {k} too small for |ξ| = {}",
            dot(xi, xi).sqrt()
        )));
    }
    let c = c2.sqrt();
    let theta = [0, 1, 2].map(|a| c * eta[a] + xi[a] / (2.0 * k));
    let omega = [0, 1, 2].map(|a| c * eta[a] - xi[a] / (2.0 * k));
    Ok((theta, omega))
}

/// `(𝓢_A - 𝓢_B)(λ_k, θ_k, ω_k)` along `√λ_k = k + i`, against `∫ W e^{-iξ·(x - x_c)}`.
pub fn s_limit_check(
    a: &Arc<DiscreteOperator>,
    b: &Arc<DiscreteOperator>,
    xi: [f64; 3],
    ks: &[f64],
) -> Result<Vec<SLimitPoint>> {
    if dot(xi, xi) == 0.0 {
        return Err(LabError::ZeroFrequency);
    }
    let eta = crate::cgo::orthogonal_unit(xi);
    let w = a.potential().sub(b.potential())?;
    let shift = C64::from_polar(1.0, dot(xi, PHASE_CENTER));
    let target = fourier_mode(&w, xi) * shift;
    ks.iter()
        .map(|&k| {
            let (theta, omega) = s_sequence(xi, eta, k)?;
            let lam = C64::new(k, 1.0).powi(2);
            let da = s_functional(a, lam, theta, omega)?;
            let db = s_functional(b, lam, theta, omega)?;
            Ok(SLimitPoint {
                k,
                theta,
                omega,
                difference: da - db,
                target,
            })
        })
        .collect()
}
