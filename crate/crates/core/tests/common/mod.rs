//! Dense direct-solve oracles shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use dnlab::field::{BoundaryField, Grid3, ScalarField};
use dnlab::C64;
use faer::linalg::solvers::Solve;
use faer::Mat;

/// Dense `-Δ_h + V - λ` on interior nodes, built straight from the 7-point stencil.
pub fn dense_operator(g: &Grid3, v: &ScalarField, lambda: C64) -> Mat<C64> {
    let n = g.interior_count();
    let h2 = 1.0 / (g.dx() * g.dx());
    let mut a = Mat::<C64>::zeros(n, n);
    for (r, &p) in g.interior().iter().enumerate() {
        a[(r, r)] = C64::new(6.0 * h2, 0.0) + v.values()[p] - lambda;
        for ax in 0..3 {
            let s = g.stride(ax);
            for q in [p + s, p - s] {
                if let Some(c) = g.interior_index(q) {
                    a[(r, c)] -= C64::new(h2, 0.0);
                }
            }
        }
    }
    a
}

/// Dirichlet problem by dense LU: interior unknowns, boundary moved to the right side.
pub fn dense_dirichlet(
    g: &Arc<Grid3>,
    v: &ScalarField,
    lambda: C64,
    f: &BoundaryField,
) -> ScalarField {
    let a = dense_operator(g, v, lambda);
    let h2 = 1.0 / (g.dx() * g.dx());
    let n = g.interior_count();
    let mut rhs = Mat::<C64>::zeros(n, 1);
    for (r, &p) in g.interior().iter().enumerate() {
        for ax in 0..3 {
            let s = g.stride(ax);
            for q in [p + s, p - s] {
                if let Some(b) = g.boundary_index(q) {
                    rhs[(r, 0)] += f.values()[b] * h2;
                }
            }
        }
    }
    let x = a.partial_piv_lu().solve(&rhs);
    let mut u = ScalarField::zeros(g).with_extension();
    for (r, &p) in g.interior().iter().enumerate() {
        u.values_mut()[p] = x[(r, 0)];
    }
    for (b, node) in g.boundary().iter().enumerate() {
        u.values_mut()[node.node] = f.values()[b];
    }
    u
}

/// Interior resolvent by dense LU.
pub fn dense_resolvent(g: &Arc<Grid3>, v: &ScalarField, lambda: C64, rhs: &[C64]) -> Vec<C64> {
    let a = dense_operator(g, v, lambda);
    let b = Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
    let x = a.partial_piv_lu().solve(&b);
    (0..rhs.len()).map(|i| x[(i, 0)]).collect()
}

/// Trapezoid edge form `Σ c Δx (u_p - u_q)(w_p - w_q) + Σ ω (V - λ) u w`.
pub fn form(g: &Grid3, v: &ScalarField, lambda: C64, u: &ScalarField, w: &ScalarField) -> C64 {
    let (uv, wv) = (u.values(), w.values());
    let mut s = C64::new(0.0, 0.0);
    g.for_each_edge(|p, q, c| s += (uv[p] - uv[q]) * (wv[p] - wv[q]) * (c * g.dx()));
    for p in 0..g.node_count() {
        s += (v.values()[p] - lambda) * uv[p] * wv[p] * g.volume_weight(p);
    }
    s
}

/// Nodal extension of boundary data by zero.
pub fn zero_extension(g: &Arc<Grid3>, f: &BoundaryField) -> ScalarField {
    let mut u = ScalarField::zeros(g).with_extension();
    for (b, node) in g.boundary().iter().enumerate() {
        u.values_mut()[node.node] = f.values()[b];
    }
    u
}

/// Dense DN matrix in the nodal basis from dense solves and the weak flux definition.
pub fn dense_dn(g: &Arc<Grid3>, v: &ScalarField, lambda: C64) -> Mat<C64> {
    let nb = g.boundary_count();
    let w = g.face_weights();
    let mut out = Mat::<C64>::zeros(nb, nb);
    let unit = |j: usize| {
        let mut e = vec![C64::new(0.0, 0.0); nb];
        e[j] = C64::new(1.0, 0.0);
        BoundaryField::new(g, e).unwrap()
    };
    let ext: Vec<ScalarField> = (0..nb).map(|i| zero_extension(g, &unit(i))).collect();
    for j in 0..nb {
        let u = dense_dirichlet(g, v, lambda, &unit(j));
        for i in 0..nb {
            out[(i, j)] = form(g, v, lambda, &u, &ext[i]) / w[i];
        }
    }
    out
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
