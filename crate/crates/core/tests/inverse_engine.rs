use std::sync::Arc;

use dnlab::cgo::{cgo_solve, make_probe, Branch};
use dnlab::dn::MatrixFreeDn;
use dnlab::field::{
    build_grid, lattice, sample_potential, NormKind, Normed, PotentialSpec, ScalarField,
};
use dnlab::forward::{assemble, DiscreteOperator};
use dnlab::inverse::{
    beta, choose_cutoff, estimate_mode, estimate_mode_data_only, psi, reconstruct,
    stability_experiment, DATA_ONLY_RHO,
};
use dnlab::{LabError, C64};
use proptest::prelude::*;
use std::f64::consts::PI;

fn op(n: usize, spec: &PotentialSpec) -> Arc<DiscreteOperator> {
    let g = build_grid(n).unwrap();
    Arc::new(assemble(&sample_potential(spec, &g).unwrap(), &g).unwrap())
}

fn mf(o: &Arc<DiscreteOperator>) -> MatrixFreeDn {
    MatrixFreeDn::new(o.clone(), C64::new(0.0, 0.0)).unwrap()
}

#[test]
fn modulus_examples() {
    assert!((psi(0.5, (-4.0f64).exp()).unwrap() - 0.51832).abs() < 1e-5);
    assert_eq!(psi(0.5, 0.0).unwrap(), 0.0);
    assert!(matches!(psi(0.5, 1.0), Err(LabError::Domain(_))));
    assert!(matches!(psi(0.0, 0.1), Err(LabError::Domain(_))));
    assert_eq!(beta(6.0), 0.5);
    assert!((beta(0.9) - 0.3).abs() < 1e-15);
}

#[test]
fn cutoff_examples() {
    let c = choose_cutoff((-10.0f64).exp(), 2.0, 0.5, 100.0).unwrap();
    assert!((c.rho - 2.5).abs() < 1e-12);
    assert!(matches!(
        choose_cutoff(0.5, 2.0, 0.5, 100.0),
        Err(LabError::DataTooNoisy { .. })
    ));
    assert!(choose_cutoff(0.0, 2.0, 0.5, 100.0).is_err());
    assert_eq!(choose_cutoff(1e-30, 2.0, 0.5, 4.0).unwrap().rho, 4.0);
    // The balanced bound approaches twice the modulus as the gap shrinks.
    let mut last = f64::INFINITY;
    for t in [8.0, 16.0, 40.0] {
        let a = (-t as f64).exp();
        let r = choose_cutoff(a, 2.0, 0.5, 100.0).unwrap().bound() / psi(0.5, a).unwrap();
        assert!(r <= 2.1 && r < last, "{t}: {r}");
        last = r;
    }
    assert!(last < 2.001);
}

#[test]
fn equal_potentials_give_zero() {
    let a = op(12, &PotentialSpec::bump(4.0));
    let (x, y) = (mf(&a), mf(&a));
    let r = reconstruct(&x, &y, DATA_ONLY_RHO, &lattice(2.0 * PI)).unwrap();
    assert_eq!(r.field.max_abs(), 0.0);
    assert!(r.modes.iter().all(|m| m.estimate == C64::new(0.0, 0.0)));
    let reps = stability_experiment(
        &[(PotentialSpec::bump(2.0), PotentialSpec::bump(2.0))],
        2.0,
        6,
    )
    .unwrap();
    assert_eq!(reps[0].aleph, 0.0);
    assert_eq!(reps[0].psi, 0.0);
    assert_eq!(reps[0].cutoff, None);
}

#[test]
fn corrected_estimate_is_exact_and_conjugate_symmetric() {
    let sa = PotentialSpec::gaussian([0.4, 0.55, 0.5], 0.15, 6.0);
    let (a, b) = (op(16, &sa), op(16, &PotentialSpec::zero()));
    let (da, db) = (mf(&a), mf(&b));
    let est = |k: [f64; 3]| {
        let p = make_probe(k, 4.0).unwrap();
        let ua = cgo_solve(&a, &p, Branch::FORWARD).unwrap();
        let ub = cgo_solve(&b, &p, Branch::PARTNER).unwrap();
        estimate_mode(&da, &db, &p, &ua, &ub, true).unwrap()
    };
    let k = [2.0 * PI, 0.0, 2.0 * PI];
    let (x, y) = (est(k), est(k.map(|c| -c)));
    assert!(x.error() < 1e-9 * x.truth.norm());
    assert!((y.estimate - x.estimate.conj()).norm() < 1e-9 * x.truth.norm());
    // Solutions built for another probe are refused.
    let p = make_probe(k, 4.0).unwrap();
    let q = make_probe(k, 5.0).unwrap();
    let ua = cgo_solve(&a, &q, Branch::FORWARD).unwrap();
    let ub = cgo_solve(&b, &q, Branch::PARTNER).unwrap();
    assert!(matches!(
        estimate_mode(&da, &db, &p, &ua, &ub, false),
        Err(LabError::Invalid(_))
    ));
}

#[test]
fn uncorrected_error_falls_with_rho() {
    let (a, b) = (
        op(16, &PotentialSpec::bump(6.0)),
        op(16, &PotentialSpec::zero()),
    );
    let (da, db) = (mf(&a), mf(&b));
    let k = [2.0 * PI, 0.0, 0.0];
    let errs: Vec<f64> = [4.0, 8.0, 12.0]
        .iter()
        .map(|&rho| {
            let p = make_probe(k, rho).unwrap();
            let ua = cgo_solve(&a, &p, Branch::FORWARD).unwrap();
            let ub = cgo_solve(&b, &p, Branch::PARTNER).unwrap();
            estimate_mode(&da, &db, &p, &ua, &ub, false)
                .unwrap()
                .error()
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
}

#[test]
fn small_differences_are_linear() {
    let b = op(16, &PotentialSpec::zero());
    let db = mf(&b);
    let k = [2.0 * PI, 0.0, 0.0];
    let per_unit: Vec<C64> = [0.025, 0.05, 0.1]
        .iter()
        .map(|&s| {
            let a = op(16, &PotentialSpec::bump(1.0).scaled(s));
            estimate_mode_data_only(&mf(&a), &db, k, DATA_ONLY_RHO)
                .unwrap()
                .estimate
                / s
        })
        .collect();
    for e in &per_unit[1..] {
        assert!(
            (e - per_unit[0]).norm() <= 0.02 * per_unit[0].norm(),
            "{per_unit:?}"
        );
    }
}

#[test]
fn wider_band_is_closer() {
    let (a, b) = (
        op(16, &PotentialSpec::bump(0.1)),
        op(16, &PotentialSpec::zero()),
    );
    let (da, db) = (mf(&a), mf(&b));
    let w: ScalarField = a.potential().sub(b.potential()).unwrap();
    let err = |radius: f64| {
        let r = reconstruct(&da, &db, DATA_ONLY_RHO, &lattice(radius)).unwrap();
        r.field.sub(&w).unwrap().norm(NormKind::L2).unwrap()
    };
    let (narrow, wide) = (err(2.0 * PI), err(4.0 * PI));
    assert!(narrow >= wide, "{narrow} vs {wide}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modulus_is_increasing_near_zero(theta in 0.1f64..2.0, x in 1e-12f64..0.3, y in 1e-12f64..0.3) {
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        prop_assume!(hi > lo);
        prop_assert!(psi(theta, lo).unwrap() <= psi(theta, hi).unwrap());
    }

    #[test]
    fn cutoff_grows_as_gap_shrinks(t in 1.5f64..60.0, c in 0.5f64..4.0) {
        let x = choose_cutoff((-t).exp(), c, 0.5, 1e9).unwrap();
        let y = choose_cutoff((-2.0 * t).exp(), c, 0.5, 1e9).unwrap();
        prop_assert!(y.rho > x.rho);
        prop_assert!((x.data_term - (-t / 2.0).exp()).abs() < 1e-12);
    }
}
