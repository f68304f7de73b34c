//! Complex geometrical optics probes: frequency geometry, remainder solves on an
//! enlarged twisted-periodic box, and eikonal checks for limiting Carleman weights.

mod eikonal;
mod probe;
mod solve;

pub use eikonal::{eikonal_check, refinement_slope, EikonalReport, Phase};
pub(crate) use probe::orthogonal_unit;
pub use probe::{make_probe, Branch, Frequency, FrequencyProbe, Sign};
pub(crate) use solve::leading;
pub use solve::{
    cgo_solve, probe_traces, BoxLayout, CgoSolution, TraceBound, ENVELOPE_C, H_WINDOW, PHASE_CENTER,
};
