use std::sync::Arc;

use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{schur_form, DnMap, DnMatrix};
use crate::field::{check_same, grad_energy, BoundaryField, Grid3, NormKind, Normed, ScalarField};
use crate::forward::assemble;
use crate::{LabError, Result};

/// Quotient `H^{1/2}(Γ)` Gram matrix and the boundary Sobolev scale it generates.
///
/// `G` is the energy of the minimal `H¹` extension (Schur complement of the `V = 1`,
/// `λ = 0` form). Writing `M^{-1/2} G M^{-1/2} = Q Θ Qᵀ`, the scale is
/// `‖f‖_s² = Σ θ^{2s} |(Qᵀ M^{1/2} f)_i|²`; `s = 1/2` is the quotient norm and
/// `s = -1/2` its dual.
#[derive(Debug)]
pub struct BoundaryGram {
    grid: Arc<Grid3>,
    gram: Mat<f64>,
    mass: Vec<f64>,
    q: Mat<C64>,
    theta: Vec<f64>,
}

fn unit_potential_op(grid: &Arc<Grid3>) -> Result<crate::forward::DiscreteOperator> {
    assemble(&ScalarField::from_real_fn(grid, |_| 1.0), grid)
}

impl BoundaryGram {
    pub fn new(grid: &Arc<Grid3>) -> Result<Self> {
        let op = unit_potential_op(grid)?;
        let k = schur_form(&op, C64::new(0.0, 0.0))?;
        let n = k.nrows();
        let gram = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (k[(i, j)].re + k[(j, i)].re));
        let mass = grid.face_weights();
        let scaled = Mat::<f64>::from_fn(n, n, |i, j| gram[(i, j)] / (mass[i] * mass[j]).sqrt());
        let evd = scaled
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| LabError::Invalid("Gram eigendecomposition failed".into()))?;
        let theta: Vec<f64> = (0..n).map(|i| evd.S().column_vector()[i]).collect();
        if theta[0] <= 0.0 {
            return Err(LabError::Invalid("singular H^1/2 Gram matrix".into()));
        }
        let u = evd.U();
        let q = Mat::<C64>::from_fn(n, n, |i, j| C64::new(u[(i, j)], 0.0));
        Ok(BoundaryGram {
            grid: grid.clone(),
            gram,
            mass,
            q,
            theta,
        })
    }

    /// Shared instance cached on the grid.
    pub fn of(grid: &Arc<Grid3>) -> Result<Arc<BoundaryGram>> {
        if let Some(g) = grid.gram.get() {
            return Ok(g.clone());
        }
        let g = Arc::new(BoundaryGram::new(grid)?);
        Ok(grid.gram.get_or_init(|| g).clone())
    }

    pub fn gram(&self) -> &Mat<f64> {
        &self.gram
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Coefficients `Qᵀ M^{1/2} f`.
    fn coefficients(&self, f: &[C64]) -> Vec<C64> {
        let n = f.len();
        let x = Mat::<C64>::from_fn(n, 1, |i, _| f[i] * self.mass[i].sqrt());
        let c = self.q.transpose() * &x;
        (0..n).map(|i| c[(i, 0)]).collect()
    }

    pub fn norm(&self, f: &BoundaryField, s: f64) -> Result<f64> {
        check_same(&self.grid, f.grid())?;
        let c = self.coefficients(f.values());
        Ok(c.iter()
            .zip(&self.theta)
            .map(|(c, t)| t.powf(2.0 * s) * c.norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Operator norm of `A - B` from `H^{1/2}` to `H^{s_out}`.
    pub fn gap(&self, a: &DnMatrix, b: &DnMatrix, s_out: f64) -> Result<f64> {
        check_same(&self.grid, a.grid())?;
        check_same(a.grid(), b.grid())?;
        if (a.lambda() - b.lambda()).norm() > 1e-14 * (1.0 + a.lambda().norm()) {
            return Err(LabError::Invalid(
                "DN maps at different spectral parameters".into(),
            ));
        }
        let n = self.mass.len();
        let d = Mat::<C64>::from_fn(n, n, |i, j| a.matrix()[(i, j)] - b.matrix()[(i, j)]);
        // T = Θ^{s_out} Qᵀ M^{1/2} (A - B) M^{-1/2} Q Θ^{-1/2}
        let left = Mat::<C64>::from_fn(n, n, |i, j| {
            self.q[(j, i)] * self.mass[j].sqrt() * self.theta[i].powf(s_out)
        });
        let right = Mat::<C64>::from_fn(n, n, |i, j| {
            self.q[(i, j)] / self.mass[i].sqrt() * self.theta[j].powf(-0.5)
        });
        let t = &left * &d * &right;
        Ok(top_singular_value(&t, 1e-10))
    }
}

/// Largest singular value by block power iteration on `TᴴT` with Rayleigh-Ritz.
pub(crate) fn top_singular_value(t: &Mat<C64>, tol: f64) -> f64 {
    let n = t.ncols();
    let b = 6.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut x = Mat::<C64>::from_fn(n, b, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let mut last = 0.0;
    for _ in 0..5000 {
        let qr = x.qr();
        let q = qr.compute_thin_Q();
        let y = t * &q;
        let sv = y.singular_values().expect("small svd");
        let s = sv[0];
        if s == 0.0 {
            return 0.0;
        }
        if (s - last).abs() <= tol * s {
            return s;
        }
        last = s;
        x = t.adjoint() * &y;
    }
    last
}

/// `‖f‖_{H^{1/2}}` as the `H¹` norm of the minimal extension, by one solve.
pub fn half_norm(f: &BoundaryField) -> Result<f64> {
    let g = f.grid();
    let op = unit_potential_op(g)?;
    let u = op.solve_dirichlet(C64::new(0.0, 0.0), f)?;
    let l2 = u.norm(NormKind::L2)?;
    Ok((l2 * l2 + grad_energy(&u)).sqrt())
}

/// Discrete `ℵ = ‖Λ_A - Λ_B‖_{H^{1/2} → H^{-1/2}}`.
pub fn dn_gap_norm(a: &DnMatrix, b: &DnMatrix) -> Result<f64> {
    BoundaryGram::of(a.grid())?.gap(a, b, -0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_grid;

    #[test]
    fn half_norm_matches_gram() {
        let g = build_grid(6).unwrap();
        let gram = BoundaryGram::of(&g).unwrap();
        let f = BoundaryField::from_fn(&g, |x| C64::new((3.0 * x[0]).sin() + x[1], x[2] * x[0]));
        let a = half_norm(&f).unwrap();
        let b = gram.norm(&f, 0.5).unwrap();
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn constant_one_quotient_norm_below_sqrt7() {
        let g = build_grid(8).unwrap();
        let one = BoundaryField::from_fn(&g, |_| C64::new(1.0, 0.0));
        let n = half_norm(&one).unwrap();
        assert!(n > 0.0 && n <= 7f64.sqrt());
    }

    #[test]
    fn dual_norm_is_dual() {
        let g = build_grid(5).unwrap();
        let gram = BoundaryGram::of(&g).unwrap();
        let f = BoundaryField::from_fn(&g, |x| C64::new(x[0] - x[2], 0.3));
        // |∫ f h| <= ‖f‖_{-1/2} ‖h‖_{1/2}
        let h = BoundaryField::from_fn(&g, |x| C64::new(x[1] * x[1], -x[0]));
        let lhs = f.pair(&h).norm();
        assert!(lhs <= gram.norm(&f, -0.5).unwrap() * gram.norm(&h, 0.5).unwrap() * (1.0 + 1e-12));
    }
}
