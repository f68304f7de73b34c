use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;
use sha2::{Digest, Sha256};

use super::traces::flux_density;
use crate::field::{check_same, BoundaryField, Grid3, ScalarField};
use crate::forward::DiscreteOperator;
use crate::{LabError, Result};

/// Largest grid for which the dense boundary matrix is assembled.
pub const DENSE_DN_MAX_N: usize = 24;

/// A discrete Dirichlet-to-Neumann map `Λ_V(λ)`.
pub trait DnMap {
    fn grid(&self) -> &Arc<Grid3>;
    fn lambda(&self) -> C64;
    fn potential(&self) -> &ScalarField;
    fn apply(&self, f: &BoundaryField) -> Result<BoundaryField>;
    /// Hint that `f` grows like `e^{x·α}`; exact maps may ignore it.
    fn apply_weighted(&self, f: &BoundaryField, _alpha: [f64; 3]) -> Result<BoundaryField> {
        self.apply(f)
    }
}

/// Short hex digest of the potential samples.
pub fn fingerprint(v: &ScalarField) -> String {
    let mut h = Sha256::new();
    h.update((v.grid().n() as u64).to_le_bytes());
    for z in v.values() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    h.finalize()
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Dense boundary matrix of `Λ_V(λ)` in the nodal basis.
#[derive(Debug, Clone)]
pub struct DnMatrix {
    grid: Arc<Grid3>,
    lambda: C64,
    matrix: Mat<C64>,
    potential: ScalarField,
    fingerprint: String,
}

impl DnMatrix {
    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Surface weights `M` (diagonal boundary mass).
    pub fn mass(&self) -> Vec<f64> {
        self.grid.face_weights()
    }

    /// `M Λ`, the matrix of the bilinear boundary form.
    pub fn form_matrix(&self) -> Mat<C64> {
        let m = self.mass();
        Mat::from_fn(m.len(), m.len(), |i, j| self.matrix[(i, j)] * m[i])
    }

    pub fn scaled(&self, a: f64) -> DnMatrix {
        let mut out = self.clone();
        out.matrix = Mat::from_fn(self.matrix.nrows(), self.matrix.ncols(), |i, j| {
            self.matrix[(i, j)] * a
        });
        out
    }

    /// Largest deviation from symmetry in the surface pairing, relative to the largest entry.
    pub fn symmetry_defect(&self) -> f64 {
        let k = self.form_matrix();
        let n = k.nrows();
        let mut worst: f64 = 0.0;
        let mut big: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((k[(i, j)] - k[(j, i)]).norm());
                big = big.max(k[(i, j)].norm());
            }
        }
        worst / big.max(1e-300)
    }

    pub fn from_parts(
        grid: &Arc<Grid3>,
        lambda: C64,
        matrix: Mat<C64>,
        potential: &ScalarField,
    ) -> Result<Self> {
        if matrix.nrows() != grid.boundary_count() || matrix.ncols() != grid.boundary_count() {
            return Err(LabError::GridMismatch(
                "matrix size differs from boundary count".into(),
            ));
        }
        Ok(DnMatrix {
            grid: grid.clone(),
            lambda,
            matrix,
            potential: potential.clone(),
            fingerprint: fingerprint(potential),
        })
    }
}

impl DnMap for DnMatrix {
    fn grid(&self) -> &Arc<Grid3> {
        &self.grid
    }
    fn lambda(&self) -> C64 {
        self.lambda
    }
    fn potential(&self) -> &ScalarField {
        &self.potential
    }
    fn apply(&self, f: &BoundaryField) -> Result<BoundaryField> {
        check_same(&self.grid, f.grid())?;
        let n = f.len();
        let x = f.values();
        let out = (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * x[j]).sum())
            .collect();
        BoundaryField::new(&self.grid, out)
    }
}

/// `Λ_V(λ)` applied by one Dirichlet solve per call.
pub struct MatrixFreeDn {
    op: Arc<DiscreteOperator>,
    lambda: C64,
}

impl MatrixFreeDn {
    pub fn new(op: Arc<DiscreteOperator>, lambda: C64) -> Result<Self> {
        op.check_resolvent(lambda)?;
        Ok(MatrixFreeDn { op, lambda })
    }

    pub fn operator(&self) -> &Arc<DiscreteOperator> {
        &self.op
    }
}

impl DnMap for MatrixFreeDn {
    fn grid(&self) -> &Arc<Grid3> {
        self.op.grid()
    }
    fn lambda(&self) -> C64 {
        self.lambda
    }
    fn potential(&self) -> &ScalarField {
        self.op.potential()
    }
    fn apply(&self, f: &BoundaryField) -> Result<BoundaryField> {
        self.apply_weighted(f, [0.0; 3])
    }
    fn apply_weighted(&self, f: &BoundaryField, alpha: [f64; 3]) -> Result<BoundaryField> {
        let u = self.op.solve_dirichlet_weighted(self.lambda, f, alpha)?;
        Ok(flux_density(&self.op, &u, self.lambda))
    }
}

/// Schur complement `S_bb - Δx⁻¹ R_QQ` in form units, where `R = (A - λ)⁻¹` restricted to
/// the interior layer adjacent to Γ.
pub(crate) fn schur_form(op: &DiscreteOperator, lambda: C64) -> Result<Mat<C64>> {
    schur_form_derivative(op, lambda, 0)
}

/// `m`-th λ-derivative of [`schur_form`]: `dᵐR/dλᵐ = m! (A - λ)^{-(m+1)}`, the boundary
/// block contributes `-ω_b` at `m = 1` and nothing beyond.
pub(crate) fn schur_form_derivative(
    op: &DiscreteOperator,
    lambda: C64,
    m: u32,
) -> Result<Mat<C64>> {
    let g = op.grid();
    let nb = g.boundary_count();
    let v = op.v();
    let dx = g.dx();
    // interior neighbour of each face node
    let owner: Vec<Option<usize>> = g
        .boundary()
        .iter()
        .map(|b| {
            g.interior_neighbours(b.node)
                .first()
                .map(|&q| g.interior_index(q).unwrap())
        })
        .collect();
    let mut layer: Vec<usize> = owner.iter().flatten().cloned().collect();
    layer.sort_unstable();
    layer.dedup();
    let pos = |q: usize| layer.binary_search(&q).unwrap();
    let nl = layer.len();
    let real = lambda.im == 0.0;
    op.check_resolvent(lambda)?;
    let fact: f64 = (1..=m).map(f64::from).product();
    let mut r = Mat::<C64>::zeros(nl, nl);
    let ni = g.interior_count();
    for (c, &q) in layer.iter().enumerate() {
        let col: Vec<C64> = if real {
            let mut e = vec![0.0; ni];
            e[q] = 1.0;
            for _ in 0..=m {
                e = op.solve_interior_real(lambda.re, &e)?;
            }
            e.into_iter().map(|x| C64::new(x, 0.0)).collect()
        } else {
            let mut e = vec![C64::new(0.0, 0.0); ni];
            e[q] = C64::new(1.0, 0.0);
            for _ in 0..=m {
                e = op.solve_interior(lambda, &e, [0.0; 3])?;
            }
            e
        };
        for (rr, &qq) in layer.iter().enumerate() {
            r[(rr, c)] = col[qq] * fact;
        }
    }
    let mut k = Mat::<C64>::zeros(nb, nb);
    if m == 1 {
        for (i, b) in g.boundary().iter().enumerate() {
            k[(i, i)] = C64::new(-g.volume_weight(b.node), 0.0);
        }
    }
    // boundary diagonal mass and boundary-incident edges
    if m == 0 {
        g.for_each_edge(|p, q, c| {
            let (bp, bq) = (g.boundary_index(p), g.boundary_index(q));
            let w = C64::new(c * dx, 0.0);
            if let Some(i) = bp {
                k[(i, i)] += w;
            }
            if let Some(j) = bq {
                k[(j, j)] += w;
            }
            if let (Some(i), Some(j)) = (bp, bq) {
                k[(i, j)] -= w;
                k[(j, i)] -= w;
            }
        });
        for (i, b) in g.boundary().iter().enumerate() {
            k[(i, i)] += (C64::new(v[b.node], 0.0) - lambda) * g.volume_weight(b.node);
        }
    }
    for i in 0..nb {
        let Some(qi) = owner[i] else { continue };
        for j in 0..nb {
            let Some(qj) = owner[j] else { continue };
            k[(i, j)] -= r[(pos(qi), pos(qj))] / dx;
        }
    }
    Ok(k)
}

/// Dense `dᵐΛ/dλᵐ` from powers of the interior resolvent.
pub fn assemble_dn_derivative(op: &DiscreteOperator, lambda: C64, m: u32) -> Result<Mat<C64>> {
    let g = op.grid();
    if g.n() > DENSE_DN_MAX_N {
        return Err(LabError::Invalid(format!(
            "dense DN matrix capped at N = {DENSE_DN_MAX_N}"
        )));
    }
    let k = schur_form_derivative(op, lambda, m)?;
    let w = g.face_weights();
    Ok(Mat::from_fn(w.len(), w.len(), |i, j| k[(i, j)] / w[i]))
}

/// Dense DN matrix; column `j` is `γ₁` of the solution with data `e_j`.
pub fn assemble_dn(op: &DiscreteOperator, lambda: C64) -> Result<DnMatrix> {
    let g = op.grid();
    if g.n() > DENSE_DN_MAX_N {
        return Err(LabError::Invalid(format!(
            "dense DN matrix capped at N = {DENSE_DN_MAX_N}; use MatrixFreeDn for N = {}",
            g.n()
        )));
    }
    let k = schur_form(op, lambda)?;
    let m = g.face_weights();
    let lam = Mat::from_fn(m.len(), m.len(), |i, j| k[(i, j)] / m[i]);
    DnMatrix::from_parts(g, lambda, lam, op.potential())
}
