//! Operator assembly, Dirichlet and resolvent solves, eigenpairs and Weyl fits.

mod eigen;
mod operator;
mod weyl;

pub use eigen::{eigendecompose, SpectralData};
pub use operator::{assemble, DiscreteOperator, DENSE_LIMIT};
pub use weyl::{loglog_slope, slope, weyl_fit};
