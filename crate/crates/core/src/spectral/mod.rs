//! Borg-Levinson side: boundary spectral data, the resolvent series for λ-derivatives
//! of the DN map, large-μ decay, and the scattering functional `𝓢`.

mod functional;
mod series;

pub use functional::{
    large_mu_gap, s_free, s_functional, s_functional_with, s_limit_check, s_sequence,
    ExponentialProbe, SLimitPoint, MU_EPSILON,
};
pub use series::{
    boundary_spectral_data, dn_derivative_series, regular_part, series_dn, series_tail, tail_slope,
    BoundarySpectralData, SeriesRange, TailPoint,
};
