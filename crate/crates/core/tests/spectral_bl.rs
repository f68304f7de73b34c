use std::sync::Arc;

use dnlab::dn::{assemble_dn, DnMap, MatrixFreeDn};
use dnlab::field::{
    build_grid, export_field, import_field, sample_potential, BoundaryField, PotentialSpec,
};
use dnlab::forward::{assemble, eigendecompose, DiscreteOperator};
use dnlab::spectral::{
    boundary_spectral_data, dn_derivative_series, large_mu_gap, s_free, s_functional,
    s_functional_with, s_sequence, series_dn, BoundarySpectralData, SeriesRange,
};
use dnlab::{LabError, C64};
use proptest::prelude::*;
use std::f64::consts::PI;

mod common;

fn op(n: usize, spec: &PotentialSpec) -> Arc<DiscreteOperator> {
    let g = build_grid(n).unwrap();
    Arc::new(assemble(&sample_potential(spec, &g).unwrap(), &g).unwrap())
}

fn full_data(a: &DiscreteOperator) -> BoundarySpectralData {
    let s = eigendecompose(a, a.grid().interior_count()).unwrap();
    boundary_spectral_data(&s, a).unwrap()
}

fn probe_field(a: &DiscreteOperator) -> BoundaryField {
    BoundaryField::from_fn(a.grid(), |x| {
        C64::new(x[0] - x[1] * x[2], (2.0 * x[2]).cos())
    })
}

fn dn_apply(a: &DiscreteOperator, lam: f64, f: &BoundaryField) -> BoundaryField {
    assemble_dn(a, C64::new(lam, 0.0))
        .unwrap()
        .apply(f)
        .unwrap()
}

#[test]
fn normal_derivative_of_ground_state() {
    let a = op(6, &PotentialSpec::bump(3.0));
    let g = a.grid().clone();
    let s = eigendecompose(&a, 1).unwrap();
    let bsd = boundary_spectral_data(&s, &a).unwrap();
    assert!(!bsd.is_complete());
    let f = BoundaryField::from_fn(&g, |x| C64::new(x[0], 0.0));
    let lam = C64::new(s.eigenvalues()[0], 0.0);
    let want = common::form(
        &g,
        a.potential(),
        lam,
        &s.field(0),
        &common::zero_extension(&g, &f),
    );
    assert!((bsd.psi(0).pair(&f) - want).norm() < 1e-10 * want.norm());
}

#[test]
fn constant_shift_keeps_simple_traces() {
    let (a, b) = (
        op(6, &PotentialSpec::zero()),
        op(6, &PotentialSpec::constant(2.0)),
    );
    let (da, db) = (full_data(&a), full_data(&b));
    let ev = da.eigenvalues();
    for k in 0..ev.len() {
        assert!((db.eigenvalues()[k] - ev[k] - 2.0).abs() < 1e-9);
        let simple =
            (k == 0 || ev[k] - ev[k - 1] > 1e-6) && (k + 1 == ev.len() || ev[k + 1] - ev[k] > 1e-6);
        if simple {
            let d = da.psi(k).sub(&db.psi(k)).unwrap().max_abs();
            assert!(d < 1e-8 * da.psi(k).max_abs(), "k = {k}: {d}");
        }
    }
}

#[test]
fn trace_norms_grow_at_most_linearly() {
    let d = full_data(&op(6, &PotentialSpec::bump(3.0)));
    assert!(d.is_complete());
    let e = d.growth_exponent();
    assert!(e > 0.0 && e <= 1.1, "{e}");
}

#[test]
fn full_series_is_the_dn_map() {
    let a = op(6, &PotentialSpec::bump(3.0));
    let d = full_data(&a);
    let f = probe_field(&a);
    for lam in [-5.0, 10.0, 40.0] {
        let want = dn_apply(&a, lam, &f);
        let got = series_dn(&a, &d, lam, 0, &f).unwrap();
        assert!(got.sub(&want).unwrap().max_abs() < 1e-9 * want.max_abs());
    }
}

#[test]
fn third_derivative_matches_differences() {
    let a = op(6, &PotentialSpec::bump(3.0));
    let d = full_data(&a);
    let f = probe_field(&a);
    let (lam, h) = (10.0, 1e-2);
    let at = |t: f64| dn_apply(&a, lam + t * h, &f);
    let w = [
        (3.0, -1.0),
        (2.0, 8.0),
        (1.0, -13.0),
        (-1.0, 13.0),
        (-2.0, -8.0),
        (-3.0, 1.0),
    ];
    let mut fd = BoundaryField::zeros(a.grid());
    for (t, c) in w {
        fd = fd
            .add(&at(t).scale(C64::new(c / (8.0 * h * h * h), 0.0)))
            .unwrap();
    }
    let got = series_dn(&a, &d, lam, 3, &f).unwrap();
    assert!(got.sub(&fd).unwrap().l2() <= 1e-3 * got.l2());
}

#[test]
fn equal_data_give_equal_maps() {
    // B is rebuilt from A's exported potential; A's boundary spectral data must
    // reproduce B's DN map.
    let a = op(6, &PotentialSpec::gaussian([0.3, 0.6, 0.5], 0.15, 4.0));
    let dir = std::env::temp_dir().join(format!("dnlab-bl-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("v.bin");
    export_field(a.potential(), &path, serde_json::json!({})).unwrap();
    let v = import_field(&path).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    let b = assemble(&v, v.grid()).unwrap();
    let d = full_data(&a);
    let f = probe_field(&a);
    for lam in [-3.0, 7.5, 25.0] {
        let want = dn_apply(&b, lam, &f);
        let got = series_dn(&b, &d, lam, 0, &f).unwrap();
        assert!(got.sub(&want).unwrap().max_abs() < 1e-9 * want.max_abs());
    }
}

#[test]
fn partial_data_leaves_a_residual() {
    let a = op(5, &PotentialSpec::bump(3.0));
    let d = full_data(&a);
    let f = probe_field(&a);
    let full = dn_derivative_series(&d, 10.0, 1, &f, SeriesRange::default()).unwrap();
    let part = dn_derivative_series(
        &d,
        10.0,
        1,
        &f,
        SeriesRange {
            skip: 1,
            truncate: None,
        },
    )
    .unwrap();
    let first = dn_derivative_series(
        &d,
        10.0,
        1,
        &f,
        SeriesRange {
            skip: 0,
            truncate: Some(1),
        },
    )
    .unwrap();
    let r = full.sub(&part).unwrap();
    assert!(r.l2() > 0.0);
    assert!(r.sub(&first).unwrap().max_abs() < 1e-12 * r.max_abs());
    let l1 = d.eigenvalues()[0];
    assert!(matches!(
        dn_derivative_series(&d, l1, 1, &f, SeriesRange::default()),
        Err(LabError::ResolventSingular { .. })
    ));
}

#[test]
fn large_mu_gap_inputs() {
    let a = op(5, &PotentialSpec::bump(3.0));
    let g = large_mu_gap(&a, &a, &[2.0, 4.0]).unwrap();
    assert!(g.iter().all(|&(_, x)| x == 0.0));
    assert!(matches!(
        large_mu_gap(&a, &a, &[1.0]),
        Err(LabError::Invalid(_))
    ));
    assert!(matches!(
        large_mu_gap(&a, &a, &[4.0, 3.0]),
        Err(LabError::Invalid(_))
    ));
}

#[test]
fn free_functional_closed_form() {
    let a = op(32, &PotentialSpec::zero());
    let lam = C64::new(3.0, 1.0).powi(2);
    let theta = [0.6, 0.8, 0.0];
    let omega = [0.0, 0.6, 0.8];
    let s = s_functional(&a, lam, theta, omega).unwrap();
    let want = s_free(a.grid(), lam, theta, omega);
    assert!((s - want).norm() <= 0.05 * want.norm(), "{s} vs {want}");
}

#[test]
fn functional_symmetries() {
    let a = op(8, &PotentialSpec::bump(4.0));
    let lam = C64::new(1.5, 0.8).powi(2);
    let theta = [0.0, 0.6, 0.8];
    let omega = [1.0, 0.0, 0.0];
    let s = s_functional(&a, lam, theta, omega).unwrap();
    let c = s_functional(&a, lam.conj(), theta.map(|x| -x), omega.map(|x| -x)).unwrap();
    assert!((c - s.conj()).norm() < 1e-9 * s.norm());
    let dense = assemble_dn(&a, lam).unwrap();
    let d = s_functional_with(&dense, theta, omega).unwrap();
    assert!((d - s).norm() < 1e-9 * s.norm());
    let free = MatrixFreeDn::new(a.clone(), lam).unwrap();
    assert!((s_functional_with(&free, theta, omega).unwrap() - s).norm() == 0.0);
}

#[test]
fn functional_domain() {
    let a = op(8, &PotentialSpec::zero());
    let e = [1.0, 0.0, 0.0];
    assert!(matches!(
        s_functional(&a, C64::new(4.0, 0.0), e, e),
        Err(LabError::Domain(_))
    ));
    assert!(matches!(
        s_functional(&a, C64::new(3.0, 1.0).powi(2), e, e),
        Err(LabError::UnderResolved(..))
    ));
    assert!(matches!(
        s_sequence([2.0 * PI, 0.0, 0.0], [0.0, 1.0, 0.0], 3.0),
        Err(LabError::Domain(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sequence_algebra(x in -8.0f64..8.0, y in -8.0f64..8.0, k in 5.0f64..40.0) {
        prop_assume!(x.abs() + y.abs() > 1e-3);
        let xi = [x, y, 0.0];
        let eta = [0.0, 0.0, 1.0];
        let (t, w) = s_sequence(xi, eta, k).unwrap();
        let d = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        prop_assert!((d(t, t) - 1.0).abs() < 1e-12 && (d(w, w) - 1.0).abs() < 1e-12);
        // With √λ = k + i the real part of √λ (θ - ω) is exactly ξ.
        let s = C64::new(k, 1.0);
        for a in 0..3 {
            let z = s * (t[a] - w[a]);
            prop_assert!((z.re - xi[a]).abs() < 1e-12 * (1.0 + xi[a].abs()));
            prop_assert!((z.im - xi[a] / k).abs() < 1e-12 * (1.0 + xi[a].abs()));
        }
    }
}
