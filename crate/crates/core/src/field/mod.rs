//! Grid geometry, nodal fields, norms, potentials and Fourier quadrature.

mod fourier;
mod grid;
pub mod io;
mod norms;
mod potential;
mod values;

pub use fourier::{fourier_mode, lattice, synthesize};
pub(crate) use grid::check_same;
pub use grid::{build_grid, BoundaryNode, Grid3};
pub use io::{export_field, import_field, read_complex, write_block, write_complex};
pub use norms::{grad_energy, norm, NormKind, Normed, P_LOWER, P_UPPER};
pub use potential::{
    random_field, sample_potential, truncate, Bump, Law, PotentialKind, PotentialSpec, BUMP_WIDTH,
};
pub use values::{BoundaryField, ScalarField};
