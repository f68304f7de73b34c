use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::cgo::{leading, make_probe, Branch, CgoSolution, FrequencyProbe, PHASE_CENTER};
use crate::dn::{gamma0, DnMap};
use crate::field::{check_same, fourier_mode, synthesize, BoundaryField, ScalarField};
use crate::{LabError, Result};

/// Auxiliary magnitude of the V-free probes used in data-only mode.
pub const DATA_ONLY_RHO: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeEstimate {
    pub k: [f64; 3],
    pub estimate: C64,
    pub truth: C64,
    pub rho: f64,
    pub h: f64,
    /// `e^{-ix_c·k} ⟨(Λ_A - Λ_B) g, g̃⟩`.
    pub pairing: C64,
    /// `∫ W (v + ṽ + vṽ) e^{-ix·k}`, zero in data-only mode.
    pub correction: C64,
}

impl ModeEstimate {
    pub fn error(&self) -> f64 {
        (self.estimate - self.truth).norm()
    }
}

fn center_phase(k: [f64; 3]) -> C64 {
    C64::from_polar(
        1.0,
        -(k[0] * PHASE_CENTER[0] + k[1] * PHASE_CENTER[1] + k[2] * PHASE_CENTER[2]),
    )
}

fn potential_difference(a: &dyn DnMap, b: &dyn DnMap) -> Result<ScalarField> {
    check_same(a.grid(), b.grid())?;
    a.potential().sub(b.potential())
}

/// Mode estimate from the paired solutions `u` (A, `(+ξ, ζ)`) and `ũ` (B, `(-ξ, ζ̃)`).
/// With `correct` the remainder term is subtracted using the stored remainders, which
/// makes the estimate equal to the quadrature Fourier mode of `V_A - V_B`.
pub fn estimate_mode(
    dn_a: &dyn DnMap,
    dn_b: &dyn DnMap,
    probe: &FrequencyProbe,
    sol_a: &CgoSolution,
    sol_b: &CgoSolution,
    correct: bool,
) -> Result<ModeEstimate> {
    if sol_a.probe != *probe || sol_b.probe != *probe {
        return Err(LabError::Invalid(
            "solutions were built for a different probe".into(),
        ));
    }
    if sol_a.branch != Branch::FORWARD || sol_b.branch != Branch::PARTNER {
        return Err(LabError::Invalid(
            "expected the (+ξ, ζ) / (-ξ, ζ̃) pair".into(),
        ));
    }
    let w = potential_difference(dn_a, dn_b)?;
    let g = gamma0(&sol_a.u)?;
    let gt = gamma0(&sol_b.u)?;
    let alpha = sol_a.phase.map(|z| z.re);
    let diff = dn_a
        .apply_weighted(&g, alpha)?
        .sub(&dn_b.apply_weighted(&g, alpha)?)?;
    let pairing = diff.pair(&gt) * center_phase(probe.k);
    let correction = if correct {
        let grid = w.grid();
        let (v, vt) = (sol_a.v.values(), sol_b.v.values());
        let r = ScalarField::from_nodal(
            grid,
            (0..grid.node_count())
                .map(|p| v[p] + vt[p] + v[p] * vt[p])
                .collect(),
            true,
        )?;
        fourier_mode(&w.zip(&r, |a, b| a * b)?, probe.k)
    } else {
        C64::new(0.0, 0.0)
    };
    Ok(ModeEstimate {
        k: probe.k,
        estimate: pairing - correction,
        truth: fourier_mode(&w, probe.k),
        rho: probe.rho,
        h: probe.h,
        pairing,
        correction,
    })
}

/// Data-only estimate: both traces are V-free discrete exponentials, so nothing about
/// either potential enters besides the two boundary maps. `k = 0` uses constant traces.
pub fn estimate_mode_data_only(
    dn_a: &dyn DnMap,
    dn_b: &dyn DnMap,
    k: [f64; 3],
    rho: f64,
) -> Result<ModeEstimate> {
    let w = potential_difference(dn_a, dn_b)?;
    let grid = dn_a.grid();
    let (g, gt, alpha, center, h) = if k.iter().all(|&c| c == 0.0) {
        let one = BoundaryField::from_fn(grid, |_| C64::new(1.0, 0.0));
        (
            one.clone(),
            one,
            [0.0; 3],
            C64::new(1.0, 0.0),
            f64::INFINITY,
        )
    } else {
        let probe = make_probe(k, rho)?;
        let a = probe.discrete_phase(Branch::FORWARD, grid.dx())?;
        let at = probe.discrete_phase(Branch::PARTNER, grid.dx())?;
        let g = BoundaryField::from_fn(grid, |x| leading(a, x));
        let gt = BoundaryField::from_fn(grid, |x| leading(at, x));
        (g, gt, a.map(|z| z.re), center_phase(k), probe.h)
    };
    let diff = dn_a
        .apply_weighted(&g, alpha)?
        .sub(&dn_b.apply_weighted(&g, alpha)?)?;
    let pairing = diff.pair(&gt) * center;
    Ok(ModeEstimate {
        k,
        estimate: pairing,
        truth: fourier_mode(&w, k),
        rho,
        h,
        pairing,
        correction: C64::new(0.0, 0.0),
    })
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub field: ScalarField,
    pub modes: Vec<ModeEstimate>,
}

impl Reconstruction {
    /// Synthesis of the true modes on the same lattice.
    pub fn band_limited_truth(&self) -> ScalarField {
        let m: Vec<_> = self.modes.iter().map(|e| (e.k, e.truth)).collect();
        synthesize(self.field.grid(), &m)
    }

    /// `‖W_rec - P W‖ / ‖P W‖` in the trapezoid L² norm.
    pub fn band_error(&self) -> Result<f64> {
        let truth = self.band_limited_truth();
        let d = self.field.sub(&truth)?;
        let n2 = |f: &ScalarField| {
            f.integrate_product(&f.map(|z| z.conj()))
                .map(|z| z.re.sqrt())
        };
        let base = n2(&truth)?;
        if base == 0.0 {
            return n2(&d);
        }
        Ok(n2(&d)? / base)
    }
}

/// Low-pass synthesis of data-only mode estimates over `lattice`, each probe with
/// auxiliary magnitude `rho`.
pub fn reconstruct(
    dn_a: &dyn DnMap,
    dn_b: &dyn DnMap,
    rho: f64,
    lattice: &[[f64; 3]],
) -> Result<Reconstruction> {
    if lattice.is_empty() {
        return Err(LabError::Invalid("empty frequency lattice".into()));
    }
    let modes = lattice
        .iter()
        .map(|&k| estimate_mode_data_only(dn_a, dn_b, k, rho))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<_> = modes.iter().map(|e| (e.k, e.estimate)).collect();
    Ok(Reconstruction {
        field: synthesize(dn_a.grid(), &pairs),
        modes,
    })
}
