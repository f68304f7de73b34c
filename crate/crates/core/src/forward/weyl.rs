use super::eigen::SpectralData;
use crate::{LabError, Result};

/// Least-squares slope of `log λ_k` against `log k` over the 1-based window `[lo, hi]`.
pub fn weyl_fit(spec: &SpectralData, lo: usize, hi: usize) -> Result<f64> {
    if lo == 0 || hi < lo || hi - lo + 1 < 10 {
        return Err(LabError::Invalid(format!(
            "window [{lo}, {hi}] has fewer than 10 points"
        )));
    }
    if hi > spec.len() {
        return Err(LabError::Invalid(format!(
            "window end {hi} beyond the {} computed eigenvalues",
            spec.len()
        )));
    }
    let vals = spec.eigenvalues();
    if vals[lo - 1] <= 0.0 {
        return Err(LabError::Domain(
            "non-positive eigenvalue inside the Weyl window".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .map(|k| ((k as f64).ln(), vals[k - 1].ln()))
        .collect();
    Ok(slope(&pts))
}

/// Ordinary least-squares slope.
pub fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).map(|(a, b)| (a.ln(), b.ln())).collect();
    slope(&pts)
}
