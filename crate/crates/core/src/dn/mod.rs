//! Traces, discrete Dirichlet-to-Neumann maps, gap norms and smoothing.

mod gram;
mod matrix;
mod smoothing;
mod traces;

pub use gram::{dn_gap_norm, half_norm, BoundaryGram};
pub use matrix::{
    assemble_dn, assemble_dn_derivative, fingerprint, DnMap, DnMatrix, MatrixFreeDn, DENSE_DN_MAX_N,
};
pub use smoothing::{smoothing_index, SmoothingReport};
pub use traces::{gamma0, gamma1, SOLUTION_TOL};
