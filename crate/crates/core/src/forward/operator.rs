use std::sync::{Arc, OnceLock};

use num_complex::Complex64 as C64;

use crate::field::{check_same, BoundaryField, Grid3, ScalarField};
use crate::linalg::{DirichletBox, Scalar, SineBasis};
use crate::{LabError, Result};

/// Interior sizes up to this use dense eigenvalues for the resolvent guard and
/// dense eigendecomposition.
pub const DENSE_LIMIT: usize = 3375;

/// `A_V = -Δ_h + V` with homogeneous Dirichlet closure on the unit cube.
///
/// The potential lives on every node; boundary samples enter only the boundary
/// mass term of the trapezoid form (and hence the DN map), never the interior
/// stencil.
pub struct DiscreteOperator {
    grid: Arc<Grid3>,
    potential: ScalarField,
    v: Vec<f64>,
    v_mean: f64,
    v_min: f64,
    v_max: f64,
    basis: SineBasis,
    dense_eigs: OnceLock<Vec<f64>>,
}

impl std::fmt::Debug for DiscreteOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiscreteOperator")
            .field("n", &self.grid.n())
            .field("v_range", &(self.v_min, self.v_max))
            .finish()
    }
}

pub fn assemble(v: &ScalarField, grid: &Arc<Grid3>) -> Result<DiscreteOperator> {
    DiscreteOperator::new(v, grid)
}

impl DiscreteOperator {
    pub fn new(v: &ScalarField, grid: &Arc<Grid3>) -> Result<Self> {
        check_same(grid, v.grid())?;
        if !v.is_real() {
            return Err(LabError::Invalid("potential must be real".into()));
        }
        let vals = v.real_parts();
        let inner: Vec<f64> = grid.interior().iter().map(|&p| vals[p]).collect();
        let v_mean = inner.iter().sum::<f64>() / inner.len() as f64;
        let v_min = inner.iter().cloned().fold(f64::INFINITY, f64::min);
        let v_max = inner.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let potential = v.clone().with_extension();
        Ok(DiscreteOperator {
            grid: grid.clone(),
            potential,
            v: vals,
            v_mean,
            v_min,
            v_max,
            basis: SineBasis::new(grid.n() - 1, grid.dx()),
            dense_eigs: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> &Arc<Grid3> {
        &self.grid
    }

    pub fn potential(&self) -> &ScalarField {
        &self.potential
    }

    pub(crate) fn v(&self) -> &[f64] {
        &self.v
    }

    /// Interior bounds of V.
    pub fn v_range(&self) -> (f64, f64) {
        (self.v_min, self.v_max)
    }

    /// Upper bound on the spectrum, `12/Δx² + max V`.
    pub fn spectral_radius(&self) -> f64 {
        12.0 / self.grid.dx().powi(2) + self.v_max.abs().max(self.v_min.abs())
    }

    /// Closed-form Dirichlet eigenvalues of `-Δ_h`, ascending.
    pub fn laplacian_spectrum(&self) -> Vec<f64> {
        let mu = &self.basis.mu;
        let mut out = Vec::with_capacity(mu.len().pow(3));
        for a in mu {
            for b in mu {
                for c in mu {
                    out.push(a + b + c);
                }
            }
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out
    }

    fn dense_eigenvalues(&self) -> &[f64] {
        self.dense_eigs
            .get_or_init(|| super::eigen::dense_eigenvalues(self))
    }

    pub(crate) fn seed_dense_eigenvalues(&self, vals: &[f64]) {
        let _ = self.dense_eigs.set(vals.to_vec());
    }

    /// Refuses `λ` within `1e-8 · spectral radius` of the discrete spectrum.
    pub fn check_resolvent(&self, lambda: C64) -> Result<()> {
        let tol = 1e-8 * self.spectral_radius();
        if lambda.im.abs() > tol {
            return Ok(());
        }
        let x = lambda.re;
        let mu = &self.basis.mu;
        let lowest = 3.0 * mu[0] + self.v_min;
        if x < lowest - tol {
            return Ok(());
        }
        let highest = 3.0 * mu[mu.len() - 1] + self.v_max;
        if x > highest + tol {
            return Ok(());
        }
        if self.grid.interior_count() <= DENSE_LIMIT {
            let eigs = self.dense_eigenvalues();
            let (nearest, dist) = eigs.iter().map(|&e| (e, (e - x).abs())).fold(
                (f64::NAN, f64::INFINITY),
                |acc, c| if c.1 < acc.1 { c } else { acc },
            );
            if dist <= tol {
                return Err(LabError::ResolventSingular {
                    lambda: format!("{lambda}"),
                    nearest,
                    distance: dist,
                });
            }
        }
        // Large grids: the Krylov solve itself reports breakdown near the spectrum.
        Ok(())
    }

    pub(crate) fn dirichlet_box<T: Scalar>(
        &self,
        lambda: C64,
        alpha: [f64; 3],
    ) -> DirichletBox<'_, T> {
        let h2 = 1.0 / self.grid.dx().powi(2);
        let lam = T::from_c64(lambda);
        let diag = self
            .grid
            .interior()
            .iter()
            .map(|&p| T::from(6.0 * h2 + self.v[p]) - lam)
            .collect();
        DirichletBox {
            basis: &self.basis,
            dx: self.grid.dx(),
            diag,
            alpha,
            shift: T::from(self.v_mean) - lam,
        }
    }

    fn box_weights(&self, alpha: [f64; 3]) -> Option<Vec<f64>> {
        if alpha.iter().all(|&a| a == 0.0) {
            return None;
        }
        Some(
            self.grid
                .interior()
                .iter()
                .map(|&p| {
                    let x = self.grid.coords(p);
                    (0..3).map(|a| alpha[a] * (x[a] - 0.5)).sum::<f64>().exp()
                })
                .collect(),
        )
    }

    /// Solves `(A - λ) x = rhs` on interior vectors, optionally in the weighted
    /// variables `x = e^{(x - x_c)·α} y` (for exponentially graded data).
    pub(crate) fn solve_interior(
        &self,
        lambda: C64,
        rhs: &[C64],
        alpha: [f64; 3],
    ) -> Result<Vec<C64>> {
        self.check_resolvent(lambda)?;
        let w = self.box_weights(alpha);
        let b: Vec<C64> = match &w {
            Some(w) => rhs.iter().zip(w).map(|(r, w)| r / w).collect(),
            None => rhs.to_vec(),
        };
        let bx = self.dirichlet_box::<C64>(lambda, alpha);
        let y = bx.solve(&b).map_err(|e| self.near_spectrum(lambda, e))?;
        Ok(match w {
            Some(w) => y.iter().zip(&w).map(|(y, w)| y * w).collect(),
            None => y,
        })
    }

    pub(crate) fn solve_interior_real(&self, lambda: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let bx = self.dirichlet_box::<f64>(C64::new(lambda, 0.0), [0.0; 3]);
        bx.solve(rhs)
    }

    fn near_spectrum(&self, lambda: C64, e: LabError) -> LabError {
        match e {
            LabError::NotConverged { .. } if lambda.im.abs() <= 1e-8 * self.spectral_radius() => {
                let spec = self.laplacian_spectrum();
                let (nearest, distance) = spec
                    .iter()
                    .map(|&m| (m + self.v_mean, (m + self.v_mean - lambda.re).abs()))
                    .fold(
                        (f64::NAN, f64::INFINITY),
                        |a, c| if c.1 < a.1 { c } else { a },
                    );
                LabError::ResolventSingular {
                    lambda: format!("{lambda}"),
                    nearest,
                    distance,
                }
            }
            e => e,
        }
    }

    /// Boundary coupling `Σ_{b ~ p} f_b / Δx²` at interior nodes.
    fn boundary_rhs(&self, f: &BoundaryField) -> Vec<C64> {
        let g = &self.grid;
        let h2 = 1.0 / g.dx().powi(2);
        let mut rhs = vec![C64::new(0.0, 0.0); g.interior_count()];
        for (b, &val) in g.boundary().iter().zip(f.values()) {
            for q in g.interior_neighbours(b.node) {
                rhs[g.interior_index(q).unwrap()] += val * h2;
            }
        }
        rhs
    }

    /// `(-Δ_h + V - λ) u = 0` inside, `u = f` on Γ.
    pub fn solve_dirichlet(&self, lambda: C64, f: &BoundaryField) -> Result<ScalarField> {
        self.solve_dirichlet_weighted(lambda, f, [0.0; 3])
    }

    /// As [`Self::solve_dirichlet`], iterating in variables scaled by `e^{(x - x_c)·α}`;
    /// use `α ≈ Re ∇ log f` for exponentially large or small data.
    pub fn solve_dirichlet_weighted(
        &self,
        lambda: C64,
        f: &BoundaryField,
        alpha: [f64; 3],
    ) -> Result<ScalarField> {
        check_same(&self.grid, f.grid())?;
        let rhs = self.boundary_rhs(f);
        let x = self.solve_interior(lambda, &rhs, alpha)?;
        let mut u = ScalarField::from_interior(&self.grid, &x);
        f.extend_into(&mut u)?;
        Ok(u)
    }

    /// `(A_V - λ)^{-1} F` with zero trace.
    pub fn resolvent_apply(&self, lambda: C64, rhs: &ScalarField) -> Result<ScalarField> {
        check_same(&self.grid, rhs.grid())?;
        let x = self.solve_interior(lambda, &rhs.interior_values(), [0.0; 3])?;
        Ok(ScalarField::from_interior(&self.grid, &x).with_extension())
    }

    /// `(-Δ_h + V - λ) u` at interior nodes, using the boundary values of `u`.
    pub fn interior_residual(&self, u: &ScalarField, lambda: C64) -> Vec<C64> {
        let g = &self.grid;
        let h2 = 1.0 / g.dx().powi(2);
        let uv = u.values();
        g.interior()
            .iter()
            .map(|&p| {
                let mut acc = uv[p] * (6.0 * h2 + self.v[p]) - uv[p] * lambda;
                for a in 0..3 {
                    let s = g.stride(a);
                    acc -= (uv[p + s] + uv[p - s]) * h2;
                }
                acc
            })
            .collect()
    }

    /// Max interior residual scaled by `(6/Δx² + max|V - λ|) · max|u|`.
    pub fn relative_residual(&self, u: &ScalarField, lambda: C64) -> f64 {
        let r = self.interior_residual(u, lambda);
        let rmax = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = 6.0 / self.grid.dx().powi(2)
            + self
                .v
                .iter()
                .map(|&v| (C64::new(v, 0.0) - lambda).norm())
                .fold(0.0, f64::max);
        let umax = u.max_abs();
        if umax == 0.0 {
            return rmax;
        }
        rmax / (scale * umax)
    }

    /// Bilinear trapezoid form `Σ_e c_e Δx (u_p - u_q)(w_p - w_q) + Σ_p ω_p (V_p - λ) u_p w_p`.
    pub fn form(&self, u: &ScalarField, w: &ScalarField, lambda: C64) -> C64 {
        let g = &self.grid;
        let (uv, wv) = (u.values(), w.values());
        let mut s = C64::new(0.0, 0.0);
        g.for_each_edge(|p, q, c| s += (uv[p] - uv[q]) * (wv[p] - wv[q]) * c);
        s *= g.dx();
        for p in 0..g.node_count() {
            s += (C64::new(self.v[p], 0.0) - lambda) * uv[p] * wv[p] * g.volume_weight(p);
        }
        s
    }

    /// Nodal flux functional `Φ_b(u) = ∂_{u_b} form(u, ·)`, per boundary node (not divided
    /// by the surface weight).
    pub fn boundary_flux(&self, u: &ScalarField, lambda: C64) -> Vec<C64> {
        let g = &self.grid;
        let uv = u.values();
        let mut phi = vec![C64::new(0.0, 0.0); g.boundary_count()];
        g.for_each_edge(|p, q, c| {
            let d = (uv[p] - uv[q]) * (c * g.dx());
            if let Some(b) = g.boundary_index(p) {
                phi[b] += d;
            }
            if let Some(b) = g.boundary_index(q) {
                phi[b] -= d;
            }
        });
        for (b, node) in g.boundary().iter().enumerate() {
            let p = node.node;
            phi[b] += (C64::new(self.v[p], 0.0) - lambda) * uv[p] * g.volume_weight(p);
        }
        phi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_grid, sample_potential, PotentialSpec};

    fn op(n: usize, spec: PotentialSpec) -> DiscreteOperator {
        let g = build_grid(n).unwrap();
        let v = sample_potential(&spec, &g).unwrap();
        assemble(&v, &g).unwrap()
    }

    #[test]
    fn quadratics_are_exact() {
        let a = op(8, PotentialSpec::zero());
        let g = a.grid().clone();
        let q = |x: [f64; 3]| C64::new(x[0] * x[0] - x[1] * x[1], 0.0);
        let f = BoundaryField::from_fn(&g, q);
        let u = a.solve_dirichlet(C64::new(0.0, 0.0), &f).unwrap();
        for p in 0..g.node_count() {
            assert!((u.values()[p] - q(g.coords(p))).norm() < 1e-11);
        }
        let one = BoundaryField::from_fn(&g, |_| C64::new(1.0, 0.0));
        let u = a.solve_dirichlet(C64::new(0.0, 0.0), &one).unwrap();
        assert!(u.values().iter().all(|z| (z - 1.0).norm() < 1e-12));
    }

    #[test]
    fn guard_rejects_eigenvalue() {
        let a = op(4, PotentialSpec::zero());
        let l1 = a.laplacian_spectrum()[0];
        let err = a.check_resolvent(C64::new(l1, 0.0)).unwrap_err();
        assert!(matches!(err, LabError::ResolventSingular { .. }));
        assert!(a.check_resolvent(C64::new(l1 + 1.0, 0.0)).is_ok());
        assert!(a.check_resolvent(C64::new(l1, 1.0)).is_ok());
    }

    #[test]
    fn residual_of_solution_is_small() {
        let a = op(8, PotentialSpec::bump(3.0));
        let g = a.grid().clone();
        let f = BoundaryField::from_fn(&g, |x| C64::new(x[0].sin(), x[1] * x[2]));
        let lam = C64::new(4.0, 1.0);
        let u = a.solve_dirichlet(lam, &f).unwrap();
        assert!(a.relative_residual(&u, lam) < 1e-12);
    }

    #[test]
    fn weighted_solve_matches_plain() {
        let a = op(8, PotentialSpec::bump(1.0));
        let g = a.grid().clone();
        let f = BoundaryField::from_fn(&g, |x| C64::from_polar((2.0 * x[0] - x[2]).exp(), x[1]));
        let lam = C64::new(0.0, 0.0);
        let u0 = a.solve_dirichlet(lam, &f).unwrap();
        let u1 = a
            .solve_dirichlet_weighted(lam, &f, [2.0, 0.0, -1.0])
            .unwrap();
        let d = u0.sub(&u1).unwrap().max_abs();
        assert!(d < 1e-10 * u0.max_abs());
    }
}
