//! Fourier-mode recovery of `V_A - V_B` from boundary data, low-pass reconstruction, and
//! the logarithmic stability experiment.

mod modes;
mod stability;

pub use modes::{
    estimate_mode, estimate_mode_data_only, reconstruct, ModeEstimate, Reconstruction,
    DATA_ONLY_RHO,
};
pub use stability::{
    beta, choose_cutoff, psi, stability_experiment, Cutoff, StabilityReport, CUTOFF_C, RHO_MAX,
};
