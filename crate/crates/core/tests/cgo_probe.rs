use std::sync::Arc;

use dnlab::cgo::{
    cgo_solve, make_probe, probe_traces, BoxLayout, Branch, CgoSolution, Sign, PHASE_CENTER,
};
use dnlab::dn::gamma0;
use dnlab::field::{build_grid, sample_potential, PotentialSpec};
use dnlab::forward::{assemble, DiscreteOperator};
use dnlab::{LabError, C64};
use faer::linalg::solvers::Solve;
use faer::Mat;
use proptest::prelude::*;
use std::f64::consts::PI;

mod common;

fn op(n: usize, spec: PotentialSpec) -> Arc<DiscreteOperator> {
    let g = build_grid(n).unwrap();
    Arc::new(assemble(&sample_potential(&spec, &g).unwrap(), &g).unwrap())
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Remainder equation in the untwisted variable on the padded box, solved densely:
/// periodic across the box except antiperiodic along the twist axis.
fn dense_remainder(a: &DiscreteOperator, sol: &CgoSolution) -> Vec<C64> {
    let g = a.grid();
    let BoxLayout { m, pad, twist_axis } = sol.layout;
    let dx = g.dx();
    let h2 = 1.0 / (dx * dx);
    let len = m * m * m;
    let mut vbox = vec![0.0; len];
    for p in 0..g.node_count() {
        let [i, j, l] = g.ijk(p);
        vbox[(((i + pad) * m) + j + pad) * m + l + pad] = a.potential().values()[p].re;
    }
    let mut mat = Mat::<C64>::zeros(len, len);
    let mut rhs = Mat::<C64>::zeros(len, 1);
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                let ijk = [i, j, l];
                let p = (i * m + j) * m + l;
                mat[(p, p)] = C64::new(6.0 * h2 + vbox[p], 0.0);
                rhs[(p, 0)] = C64::new(-vbox[p], 0.0);
                for ax in 0..3 {
                    for dir in [1i64, -1] {
                        let mut q = ijk;
                        let t = ijk[ax] as i64 + dir;
                        let wrapped = t < 0 || t >= m as i64;
                        q[ax] = t.rem_euclid(m as i64) as usize;
                        let sign = if wrapped && ax == twist_axis {
                            -1.0
                        } else {
                            1.0
                        };
                        let c = (sol.phase[ax] * dx * dir as f64).exp() * sign * h2;
                        let qi = (q[0] * m + q[1]) * m + q[2];
                        mat[(p, qi)] -= c;
                    }
                }
            }
        }
    }
    let x = mat.partial_piv_lu().solve(&rhs);
    (0..g.node_count())
        .map(|p| {
            let [i, j, l] = g.ijk(p);
            x[((((i + pad) * m) + j + pad) * m + l + pad, 0)]
        })
        .collect()
}

#[test]
fn remainder_matches_dense_box_solve() {
    let a = op(8, PotentialSpec::bump(5.0));
    let probe = make_probe([2.0 * PI, 0.0, 0.0], 3.0).unwrap();
    let sol = cgo_solve(&a, &probe, Branch::FORWARD).unwrap();
    let want = dense_remainder(&a, &sol);
    let scale = want.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(common::max_diff(sol.v.values(), &want) < 1e-9 * scale);
}

#[test]
fn solution_matches_dirichlet_oracle() {
    let a = op(8, PotentialSpec::bump(5.0));
    let g = a.grid().clone();
    let probe = make_probe([0.0, 2.0 * PI, 0.0], 3.0).unwrap();
    for branch in [Branch::FORWARD, Branch::PARTNER] {
        let sol = cgo_solve(&a, &probe, branch).unwrap();
        assert!(sol.residual < 1e-10);
        assert!(sol.identity_defect() < 1e-10);
        let f = gamma0(&sol.u).unwrap();
        let w = common::dense_dirichlet(&g, a.potential(), C64::new(0.0, 0.0), &f);
        assert!(common::max_diff(sol.u.values(), w.values()) < 1e-9 * sol.u.max_abs());
    }
}

#[test]
fn free_solution_is_pure_exponential() {
    let a = op(12, PotentialSpec::zero());
    let probe = make_probe([2.0 * PI, 0.0, 0.0], 4.0).unwrap();
    let sol = cgo_solve(&a, &probe, Branch::FORWARD).unwrap();
    assert!(sol.v.max_abs() < 1e-12);
    let g = a.grid();
    let c = g.index(6, 6, 6);
    assert_eq!(g.coords(c), PHASE_CENTER);
    assert!((sol.u.values()[c] - 1.0).norm() < 1e-12);
}

#[test]
fn input_errors() {
    assert!(matches!(
        make_probe([0.0; 3], 1.0),
        Err(LabError::ZeroFrequency)
    ));
    assert!(matches!(
        make_probe([1.0, 0.0, 0.0], 0.0),
        Err(LabError::Invalid(_))
    ));
    let a = op(8, PotentialSpec::zero());
    let far = make_probe([2.0 * PI, 0.0, 0.0], 20.0).unwrap();
    assert!(matches!(
        cgo_solve(&a, &far, Branch::FORWARD),
        Err(LabError::HOutOfRange { .. })
    ));
}

#[test]
fn mirrored_branches_have_equal_traces() {
    // A centred bump is invariant under the reflection that flips ξ.
    let a = op(16, PotentialSpec::bump(8.0));
    let probe = make_probe([4.0, 0.0, 0.0], 4.0).unwrap();
    let x = cgo_solve(&a, &probe, Branch::FORWARD).unwrap();
    let y = cgo_solve(&a, &probe, Branch::FORWARD.flipped()).unwrap();
    assert_eq!(y.branch.sign, Sign::Minus);
    let (nx, ny) = (
        probe_traces(&x).unwrap().1.norm,
        probe_traces(&y).unwrap().1.norm,
    );
    assert!((nx - ny).abs() < 1e-6 * nx, "{nx} vs {ny}");
}

#[test]
fn trace_growth_within_envelope() {
    let a = op(16, PotentialSpec::bump(8.0));
    let k = [2.0 * PI, 0.0, 0.0];
    let mut last: Option<(f64, f64)> = None;
    for rho in [1.5, 3.0, 6.5] {
        let probe = make_probe(k, rho).unwrap();
        let sol = cgo_solve(&a, &probe, Branch::FORWARD).unwrap();
        let (_, b) = probe_traces(&sol).unwrap();
        assert!(b.norm <= b.envelope());
        if let Some((h0, n0)) = last {
            let grow = b.norm.ln() - n0.ln();
            assert!(grow <= 1.1 * b.c * (1.0 / b.h - 1.0 / h0), "{grow}");
        }
        last = Some((b.h, b.norm));
    }
}

#[test]
fn remainder_shrinks_with_h() {
    let a = op(16, PotentialSpec::bump(10.0));
    let k = [2.0 * PI, 0.0, 0.0];
    let norms: Vec<(f64, f64)> = [2.0, 4.0, 6.0, 8.0]
        .iter()
        .map(|&rho| {
            let sol = cgo_solve(&a, &make_probe(k, rho).unwrap(), Branch::FORWARD).unwrap();
            (sol.probe.h, sol.v_l2)
        })
        .collect();
    for w in norms.windows(2) {
        assert!(w[1].0 < w[0].0);
        assert!(w[1].1 <= w[0].1 * 1.05, "{norms:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probe_algebra(kx in -20.0f64..20.0, ky in -20.0f64..20.0, kz in -20.0f64..20.0, rho in 0.5f64..30.0) {
        prop_assume!(kx.abs() + ky.abs() + kz.abs() > 1e-3);
        let k = [kx, ky, kz];
        let p = make_probe(k, rho).unwrap();
        prop_assert!((dot(p.xi, p.xi) - 1.0).abs() < 1e-12);
        prop_assert!((dot(p.zeta, p.zeta) - 1.0).abs() < 1e-12);
        prop_assert!((dot(p.zeta_tilde, p.zeta_tilde) - 1.0).abs() < 1e-12);
        let scale = 1.0 + dot(k, k).sqrt();
        prop_assert!(dot(p.xi, p.zeta).abs() < 1e-12 && dot(p.xi, k).abs() < 1e-12 * scale);
        for a in 0..3 {
            prop_assert!((p.zeta[a] + p.zeta_tilde[a] - p.h * k[a]).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn paired_phases_isolate_frequency(kx in -15.0f64..15.0, ky in -15.0f64..15.0, rho in 2.0f64..10.0) {
        prop_assume!(kx.abs() + ky.abs() > 1e-2);
        let k = [kx, ky, 1.0];
        let p = make_probe(k, rho).unwrap();
        let c = p.continuum_phase(Branch::FORWARD);
        let d = p.continuum_phase(Branch::PARTNER);
        let dx = 1.0 / 32.0;
        let e = p.discrete_phase(Branch::FORWARD, dx).unwrap();
        let f = p.discrete_phase(Branch::PARTNER, dx).unwrap();
        for a in 0..3 {
            prop_assert!((c[a] + d[a] - C64::new(0.0, -k[a])).norm() < 1e-10 * (1.0 + rho));
            prop_assert!((e[a] + f[a] - C64::new(0.0, -k[a])).norm() < 1e-10 * (1.0 + rho));
        }
    }
}
