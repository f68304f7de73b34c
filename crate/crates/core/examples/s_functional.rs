//! The exponential-probe functional along √λ = k + i and its limit, the Fourier mode of V.
use std::f64::consts::PI;
use std::sync::Arc;

use dnlab::field::{build_grid, sample_potential, PotentialSpec};
use dnlab::forward::assemble;
use dnlab::spectral::{s_free, s_functional, s_limit_check};
use dnlab::C64;

fn main() -> dnlab::Result<()> {
    let grid = build_grid(24)?;
    let op = |s: PotentialSpec| -> dnlab::Result<_> {
        Ok(Arc::new(assemble(&sample_potential(&s, &grid)?, &grid)?))
    };
    let (a, b) = (op(PotentialSpec::bump(0.1))?, op(PotentialSpec::zero())?);

    let lam = C64::new(3.0, 1.0).powi(2);
    let (theta, omega) = ([0.6, 0.8, 0.0], [0.0, 0.6, 0.8]);
    println!(
        "V = 0: discrete {:.5}, closed form {:.5}",
        s_functional(&b, lam, theta, omega)?,
        s_free(&grid, lam, theta, omega)
    );

    for p in s_limit_check(&a, &b, [2.0 * PI, 0.0, 0.0], &[4.0, 5.0, 6.0])? {
        println!(
            "k = {}: difference {:.5}, target {:.5}, gap {:.3}",
            p.k,
            p.difference,
            p.target,
            p.gap()
        );
    }
    Ok(())
}
