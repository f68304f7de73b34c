use std::sync::Arc;

use dnlab::dn::{
    assemble_dn, dn_gap_norm, gamma0, gamma1, smoothing_index, DnMap, DnMatrix, MatrixFreeDn,
};
use dnlab::field::{build_grid, sample_potential, Grid3, PotentialSpec, ScalarField};
use dnlab::forward::{assemble, DiscreteOperator};
use dnlab::{LabError, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;

const ZERO: C64 = C64::new(0.0, 0.0);

fn op(n: usize, spec: PotentialSpec) -> Arc<DiscreteOperator> {
    let g = build_grid(n).unwrap();
    Arc::new(assemble(&sample_potential(&spec, &g).unwrap(), &g).unwrap())
}

fn dn(n: usize, spec: PotentialSpec) -> DnMatrix {
    assemble_dn(&op(n, spec), ZERO).unwrap()
}

fn random(g: &Arc<Grid3>, seed: u64) -> ScalarField {
    dnlab::field::random_field(g, &mut ChaCha8Rng::seed_from_u64(seed), true)
}

#[test]
fn trace_examples() {
    let g = build_grid(5).unwrap();
    let u = ScalarField::from_real_fn(&g, |x| x[0] + 2.0 * x[2]);
    let f = gamma0(&u).unwrap();
    for (b, node) in g.boundary().iter().enumerate() {
        let x = g.coords(node.node);
        assert_eq!(f.values()[b], C64::new(x[0] + 2.0 * x[2], 0.0));
    }
    let interior = ScalarField::from_interior(&g, &vec![ZERO; g.interior_count()]);
    assert!(matches!(gamma0(&interior), Err(LabError::MissingBoundary)));
    let a = op(5, PotentialSpec::zero());
    assert!(matches!(
        gamma1(&a, &ScalarField::from_real_fn(&g, |x| x[0] * x[0]), ZERO),
        Err(LabError::NotASolution(_))
    ));
}

#[test]
fn matches_dense_oracle() {
    let a = op(5, PotentialSpec::bump(3.0));
    let g = a.grid().clone();
    for lam in [ZERO, C64::new(5.0, 2.0)] {
        let m = assemble_dn(&a, lam).unwrap();
        let want = common::dense_dn(&g, a.potential(), lam);
        let n = g.boundary_count();
        let mut worst: f64 = 0.0;
        let mut big: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((m.matrix()[(i, j)] - want[(i, j)]).norm());
                big = big.max(want[(i, j)].norm());
            }
        }
        assert!(worst < 1e-9 * big, "{worst} vs {big}");
    }
}

#[test]
fn pairing_is_symmetric() {
    let m = assemble_dn(&op(6, PotentialSpec::bump(2.0)), C64::new(2.0, 1.0)).unwrap();
    assert!(m.symmetry_defect() < 1e-10);
}

#[test]
fn gap_examples() {
    let z = dn(6, PotentialSpec::zero());
    assert_eq!(dn_gap_norm(&z, &z).unwrap(), 0.0);
    let gaps: Vec<f64> = [1.0, 2.0, 4.0]
        .iter()
        .map(|&c| dn_gap_norm(&z, &dn(6, PotentialSpec::constant(c))).unwrap())
        .collect();
    assert!(
        gaps[0] > 0.0 && gaps[0] < gaps[1] && gaps[1] < gaps[2],
        "{gaps:?}"
    );
    let b = dn(6, PotentialSpec::bump(3.0));
    let g1 = dn_gap_norm(&z, &b).unwrap();
    let g2 = dn_gap_norm(&z.scaled(2.5), &b.scaled(2.5)).unwrap();
    assert!((g2 - 2.5 * g1).abs() < 1e-9 * g2);
    assert!((dn_gap_norm(&b, &z).unwrap() - g1).abs() < 1e-9 * g1);
}

#[test]
fn different_parameters_rejected() {
    let a = op(5, PotentialSpec::zero());
    let x = assemble_dn(&a, ZERO).unwrap();
    let y = assemble_dn(&a, C64::new(1.0, 0.0)).unwrap();
    assert!(matches!(dn_gap_norm(&x, &y), Err(LabError::Invalid(_))));
}

#[test]
fn difference_smooths_more() {
    let a = op(32, PotentialSpec::zero());
    let mf = |o: Arc<DiscreteOperator>| MatrixFreeDn::new(o, ZERO).unwrap();
    let base = mf(a);
    for spec in [PotentialSpec::constant(1.0), PotentialSpec::bump(5.0)] {
        let r = smoothing_index(&base, &mf(op(32, spec))).unwrap();
        assert!(r.gap > 0.5, "{r:?}");
        assert!(r.exponent_single <= 1.1, "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn flux_independent_of_extension(seed in any::<u64>()) {
        let a = op(5, PotentialSpec::bump(2.0));
        let g = a.grid().clone();
        let lam = C64::new(1.0, 3.0);
        let f = gamma0(&random(&g, seed)).unwrap();
        let u = a.solve_dirichlet(lam, &f).unwrap();
        let e1 = common::zero_extension(&g, &f);
        let e2 = random(&g, seed.wrapping_add(1)).zip(&e1, |r, z| z + r).unwrap();
        let e2 = {
            let mut e = e2;
            for (b, node) in g.boundary().iter().enumerate() {
                e.values_mut()[node.node] = f.values()[b];
            }
            e
        };
        let (x, y) = (a.form(&u, &e1, lam), a.form(&u, &e2, lam));
        prop_assert!((x - y).norm() < 1e-9 * (1.0 + x.norm()));
        let h = gamma1(&a, &u, lam).unwrap();
        prop_assert!((h.pair(&f) - x).norm() < 1e-9 * (1.0 + x.norm()));
    }

    #[test]
    fn energy_is_real(seed in any::<u64>()) {
        let m = dn(5, PotentialSpec::bump(2.0));
        let f = gamma0(&random(m.grid(), seed)).unwrap();
        let e = m.apply(&f).unwrap().inner(&f);
        prop_assert!(e.im.abs() < 1e-9 * e.norm());
        prop_assert!(e.re >= 0.0);
    }

    #[test]
    fn monotone_in_potential(seed in any::<u64>(), c in 0.1f64..5.0) {
        let lo = dn(5, PotentialSpec::bump(1.0));
        let hi = dn(5, PotentialSpec::bump(1.0 + c));
        let f = gamma0(&random(lo.grid(), seed)).unwrap();
        let a = lo.apply(&f).unwrap().inner(&f).re;
        let b = hi.apply(&f).unwrap().inner(&f).re;
        prop_assert!(a <= b + 1e-10 * b.abs());
    }
}
