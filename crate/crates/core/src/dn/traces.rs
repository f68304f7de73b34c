use num_complex::Complex64 as C64;

use crate::field::{check_same, BoundaryField, ScalarField};
use crate::forward::DiscreteOperator;
use crate::{LabError, Result};

/// Residual level above which a field is not accepted as a discrete solution.
pub const SOLUTION_TOL: f64 = 1e-6;

/// Dirichlet trace.
pub fn gamma0(u: &ScalarField) -> Result<BoundaryField> {
    if !u.is_extended() {
        return Err(LabError::MissingBoundary);
    }
    let g = u.grid();
    BoundaryField::new(g, g.boundary().iter().map(|b| u.values()[b.node]).collect())
}

/// Weak normal derivative of a discrete solution of `(-Δ_h + V - λ) u = 0`,
/// represented against the surface weights: `⟨γ₁u, f⟩_Γ = form(u, F)` for any
/// nodal extension `F` of `f`.
pub fn gamma1(op: &DiscreteOperator, u: &ScalarField, lambda: C64) -> Result<BoundaryField> {
    check_same(op.grid(), u.grid())?;
    if !u.is_extended() {
        return Err(LabError::MissingBoundary);
    }
    let r = op.relative_residual(u, lambda);
    if !(r <= SOLUTION_TOL) {
        return Err(LabError::NotASolution(r));
    }
    Ok(flux_density(op, u, lambda))
}

/// `M⁻¹ Φ(u)` without the solution check.
pub(crate) fn flux_density(op: &DiscreteOperator, u: &ScalarField, lambda: C64) -> BoundaryField {
    let g = op.grid();
    let phi = op.boundary_flux(u, lambda);
    let vals = phi
        .iter()
        .zip(g.boundary())
        .map(|(p, b)| p / b.weight)
        .collect();
    BoundaryField::new(g, vals).expect("boundary length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_grid, sample_potential, PotentialSpec};
    use crate::forward::assemble;

    #[test]
    fn traces_of_simple_fields() {
        let g = build_grid(8).unwrap();
        let op = assemble(&sample_potential(&PotentialSpec::zero(), &g).unwrap(), &g).unwrap();
        let x1 = ScalarField::from_real_fn(&g, |x| x[0]);
        let f = gamma0(&x1).unwrap();
        for (b, z) in g.boundary().iter().zip(f.values()) {
            assert_eq!(z.re, g.coords(b.node)[0]);
        }
        let zero = C64::new(0.0, 0.0);
        let flux = gamma1(&op, &x1, zero).unwrap();
        assert!((flux.pair(&f) - 1.0).norm() < 1e-10);
        let one = ScalarField::from_real_fn(&g, |_| 1.0);
        assert!(gamma1(&op, &one, zero).unwrap().max_abs() < 1e-10);
        let bad = ScalarField::from_real_fn(&g, |x| x[0] * x[0]);
        assert!(matches!(
            gamma1(&op, &bad, zero),
            Err(LabError::NotASolution(_))
        ));
        let inner = ScalarField::from_interior(&g, &vec![C64::new(1.0, 0.0); g.interior_count()]);
        assert!(gamma0(&inner).is_err());
    }
}
