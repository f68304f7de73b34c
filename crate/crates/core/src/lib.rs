//! Discrete laboratory for the inverse potential problem for `-Δ + V` on the unit cube.
//!
//! The crate builds 7-point finite-difference Dirichlet problems, their
//! Dirichlet-to-Neumann maps, complex geometric optics (CGO) probes, Fourier-mode
//! recovery of potential differences, logarithmic stability sweeps and the
//! Borg-Levinson resolvent series. Everything is deterministic and single-seeded.
//!
//! Module map:
//! - [`field`]: grid, nodal fields, norms, potentials, Fourier quadrature, export.
//! - [`forward`]: operator assembly, Dirichlet and resolvent solves, eigenpairs, Weyl fits.
//! - [`dn`]: traces, DN matrices and matrix-free DN maps, gap norms, smoothing index.
//! - [`cgo`]: frequency probes, CGO solutions, eikonal validators.
//! - [`inverse`]: mode estimates, low-pass reconstruction, stability experiment.
//! - [`spectral`]: boundary spectral data, derivative series, large-μ gaps, S-functional.
//! - [`harness`]: config-driven experiment runner behind the `lab` binary.

pub mod cgo;
pub mod dn;
pub mod error;
pub mod field;
pub mod forward;
pub mod harness;
pub mod inverse;
pub mod spectral;

mod linalg;

pub use error::{LabError, Result};
pub use num_complex::Complex64 as C64;
