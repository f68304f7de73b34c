use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::dn::gamma1;
use crate::field::{BoundaryField, Grid3};
use crate::forward::{loglog_slope, DiscreteOperator, SpectralData};
use crate::{LabError, Result};

/// Eigenvalues with the boundary normal derivatives `ψ_k = γ₁ φ_k`.
#[derive(Debug, Clone)]
pub struct BoundarySpectralData {
    grid: Arc<Grid3>,
    values: Vec<f64>,
    /// Row-major `m × boundary`.
    psi: Vec<f64>,
    norms: Vec<f64>,
    complete: bool,
}

pub fn boundary_spectral_data(
    spec: &SpectralData,
    op: &DiscreteOperator,
) -> Result<BoundarySpectralData> {
    let grid = spec.grid().clone();
    let nb = grid.boundary_count();
    let mut psi = Vec::with_capacity(spec.len() * nb);
    let mut norms = Vec::with_capacity(spec.len());
    for k in 0..spec.len() {
        let lam = C64::new(spec.eigenvalues()[k], 0.0);
        let p = gamma1(op, &spec.field(k), lam).map_err(|e| e.in_stage(&format!("ψ_{}", k + 1)))?;
        norms.push(p.l2());
        psi.extend(p.values().iter().map(|z| z.re));
    }
    Ok(BoundarySpectralData {
        complete: spec.len() == grid.interior_count(),
        grid,
        values: spec.eigenvalues().to_vec(),
        psi,
        norms,
    })
}

impl BoundarySpectralData {
    pub fn grid(&self) -> &Arc<Grid3> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Whether every interior eigenpair is present.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    fn row(&self, k: usize) -> &[f64] {
        let nb = self.grid.boundary_count();
        &self.psi[k * nb..(k + 1) * nb]
    }

    pub fn psi(&self, k: usize) -> BoundaryField {
        BoundaryField::new(
            &self.grid,
            self.row(k).iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
        .expect("boundary length")
    }

    /// `‖ψ_k‖_{L²(Γ)}`.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// Log-log slope of `‖ψ_k‖` against `|λ_k| + 1`.
    pub fn growth_exponent(&self) -> f64 {
        let x: Vec<f64> = self.values.iter().map(|l| l.abs() + 1.0).collect();
        loglog_slope(&x, &self.norms)
    }

    /// Scaled series terms `(f, ψ_k)_Γ / (λ_k - λ)^{m+1}` (without the `-m!` factor).
    fn coefficients(&self, lambda: f64, m: u32, f: &BoundaryField) -> Result<Vec<C64>> {
        if !self.grid.same_as(f.grid()) {
            return Err(LabError::GridMismatch(
                "boundary field and spectral data".into(),
            ));
        }
        let w = self.grid.face_weights();
        let fv = f.values();
        self.values
            .iter()
            .enumerate()
            .map(|(k, &lk)| {
                let d = lk - lambda;
                if d.abs() <= 1e-10 * (lk.abs() + 1.0) {
                    return Err(LabError::ResolventSingular {
                        lambda: format!("{lambda}"),
                        nearest: lk,
                        distance: d.abs(),
                    });
                }
                let c: C64 = self
                    .row(k)
                    .iter()
                    .zip(fv)
                    .zip(&w)
                    .map(|((p, z), m)| z * (p * m))
                    .sum();
                Ok(c / d.powi(m as i32 + 1))
            })
            .collect()
    }
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(f64::from).product()
}

/// Which eigenpairs enter the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SeriesRange {
    /// Drop the first `skip` pairs (partial spectral data).
    pub skip: usize,
    /// Keep at most this many pairs.
    pub truncate: Option<usize>,
}

/// Spectral part `-m! Σ_k (λ_k - λ)^{-(m+1)} (f, ψ_k)_Γ ψ_k` of `dᵐΛ/dλᵐ f`.
pub fn dn_derivative_series(
    bsd: &BoundarySpectralData,
    lambda: f64,
    m: u32,
    f: &BoundaryField,
    range: SeriesRange,
) -> Result<BoundaryField> {
    let c = bsd.coefficients(lambda, m, f)?;
    let hi = range.truncate.map_or(bsd.len(), |t| t.min(bsd.len()));
    let nb = bsd.grid.boundary_count();
    let mut out = vec![C64::new(0.0, 0.0); nb];
    let s = -factorial(m);
    for (k, ck) in c.iter().enumerate().take(hi).skip(range.skip) {
        let a = ck * s;
        for (o, p) in out.iter_mut().zip(bsd.row(k)) {
            *o += a * *p;
        }
    }
    BoundaryField::new(&bsd.grid, out)
}

/// Boundary-local part `M⁻¹ S_bb(λ) f` of the discrete map and its λ-derivatives.
pub fn regular_part(
    op: &DiscreteOperator,
    lambda: f64,
    m: u32,
    f: &BoundaryField,
) -> Result<BoundaryField> {
    let g = op.grid();
    if !g.same_as(f.grid()) {
        return Err(LabError::GridMismatch("boundary field and operator".into()));
    }
    let mass = g.face_weights();
    let fv = f.values();
    let nb = g.boundary_count();
    let mut out = vec![C64::new(0.0, 0.0); nb];
    match m {
        0 => {
            let dx = g.dx();
            g.for_each_edge(|p, q, c| {
                let (bp, bq) = (g.boundary_index(p), g.boundary_index(q));
                let fp = bp.map_or(C64::new(0.0, 0.0), |i| fv[i]);
                let fq = bq.map_or(C64::new(0.0, 0.0), |i| fv[i]);
                if let Some(i) = bp {
                    out[i] += (fp - fq) * (c * dx);
                }
                if let Some(j) = bq {
                    out[j] += (fq - fp) * (c * dx);
                }
            });
            let v = op.v();
            for (i, b) in g.boundary().iter().enumerate() {
                out[i] += fv[i] * ((v[b.node] - lambda) * g.volume_weight(b.node));
            }
        }
        1 => {
            for (i, b) in g.boundary().iter().enumerate() {
                out[i] = -fv[i] * g.volume_weight(b.node);
            }
        }
        _ => {}
    }
    for (o, w) in out.iter_mut().zip(&mass) {
        *o /= *w;
    }
    BoundaryField::new(g, out)
}

/// `dᵐΛ/dλᵐ f` assembled from the regular part and the spectral series.
pub fn series_dn(
    op: &DiscreteOperator,
    bsd: &BoundarySpectralData,
    lambda: f64,
    m: u32,
    f: &BoundaryField,
) -> Result<BoundaryField> {
    regular_part(op, lambda, m, f)?.add(&dn_derivative_series(
        bsd,
        lambda,
        m,
        f,
        SeriesRange::default(),
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailPoint {
    pub k: usize,
    pub tail: f64,
}

/// `‖Σ_{j>K} term_j‖_{L²(Γ)}` for each `K` in `cutoffs`.
pub fn series_tail(
    bsd: &BoundarySpectralData,
    lambda: f64,
    m: u32,
    f: &BoundaryField,
    cutoffs: &[usize],
) -> Result<Vec<TailPoint>> {
    let c = bsd.coefficients(lambda, m, f)?;
    let nb = bsd.grid.boundary_count();
    let s = -factorial(m);
    let mut acc = vec![C64::new(0.0, 0.0); nb];
    let mut out = Vec::new();
    let mut sorted: Vec<usize> = cutoffs.iter().cloned().filter(|&k| k < bsd.len()).collect();
    sorted.sort_unstable();
    sorted.dedup();
    for k in (0..bsd.len()).rev() {
        if sorted.binary_search(&(k + 1)).is_ok() {
            let tail = BoundaryField::new(&bsd.grid, acc.clone())?.l2();
            out.push(TailPoint { k: k + 1, tail });
        }
        let a = c[k] * s;
        for (o, p) in acc.iter_mut().zip(bsd.row(k)) {
            *o += a * *p;
        }
    }
    out.reverse();
    Ok(out)
}

/// Log-log slope of the tail against the cutoff index.
pub fn tail_slope(points: &[TailPoint]) -> f64 {
    let x: Vec<f64> = points.iter().map(|p| p.k as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.tail).collect();
    loglog_slope(&x, &y)
}
