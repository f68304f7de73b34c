use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::matrix::DnMap;
use crate::field::{check_same, BoundaryField};
use crate::forward::loglog_slope;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingReport {
    /// Mode indices `p` of `sin(pπy) sin(pπz)` on the face `x₁ = 0`.
    pub modes: Vec<usize>,
    pub response: Vec<f64>,
    pub difference: Vec<f64>,
    pub exponent_single: f64,
    pub exponent_difference: f64,
    /// `exponent_single - exponent_difference`; `+∞` when the maps coincide.
    pub gap: f64,
}

/// Decay of `(A - B) f_p` against `A f_p` over sine modes on one face.
pub fn smoothing_index(a: &dyn DnMap, b: &dyn DnMap) -> Result<SmoothingReport> {
    check_same(a.grid(), b.grid())?;
    let g = a.grid().clone();
    let modes: Vec<usize> = (1..=g.n() / 2).collect();
    let mut response = Vec::new();
    let mut difference = Vec::new();
    for &p in &modes {
        let f = BoundaryField::from_fn(&g, |x| {
            if x[0] == 0.0 {
                C64::new(
                    (p as f64 * PI * x[1]).sin() * (p as f64 * PI * x[2]).sin(),
                    0.0,
                )
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let f = f.scale(C64::new(1.0 / f.l2(), 0.0));
        let af = a.apply(&f)?;
        let bf = b.apply(&f)?;
        response.push(af.l2());
        difference.push(af.sub(&bf)?.l2());
    }
    let fit: Vec<usize> = (1..modes.len()).collect();
    let xs: Vec<f64> = fit.iter().map(|&i| modes[i] as f64).collect();
    let ra: Vec<f64> = fit.iter().map(|&i| response[i]).collect();
    let rd: Vec<f64> = fit.iter().map(|&i| difference[i]).collect();
    let exponent_single = loglog_slope(&xs, &ra);
    let scale = response.iter().cloned().fold(0.0, f64::max);
    if difference.iter().all(|&d| d <= 1e-13 * scale) {
        return Ok(SmoothingReport {
            modes,
            response,
            difference,
            exponent_single,
            exponent_difference: f64::NEG_INFINITY,
            gap: f64::INFINITY,
        });
    }
    let exponent_difference = loglog_slope(&xs, &rd);
    Ok(SmoothingReport {
        modes,
        response,
        difference,
        exponent_single,
        exponent_difference,
        gap: exponent_single - exponent_difference,
    })
}
