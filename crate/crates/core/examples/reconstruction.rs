//! Fourier modes of V_A - V_B from boundary data, with and without the remainder correction,
//! then a low-pass reconstruction.
use std::f64::consts::PI;
use std::sync::Arc;

use dnlab::cgo::{cgo_solve, make_probe, Branch};
use dnlab::dn::MatrixFreeDn;
use dnlab::field::{build_grid, lattice, sample_potential, PotentialSpec};
use dnlab::forward::assemble;
use dnlab::inverse::{estimate_mode, reconstruct, DATA_ONLY_RHO};
use dnlab::C64;

fn main() -> dnlab::Result<()> {
    let grid = build_grid(16)?;
    let op = |s: PotentialSpec| -> dnlab::Result<_> {
        Ok(Arc::new(assemble(&sample_potential(&s, &grid)?, &grid)?))
    };
    let (a, b) = (op(PotentialSpec::bump(4.0))?, op(PotentialSpec::zero())?);
    let zero = C64::new(0.0, 0.0);
    let (da, db) = (
        MatrixFreeDn::new(a.clone(), zero)?,
        MatrixFreeDn::new(b.clone(), zero)?,
    );

    let k = [2.0 * PI, 0.0, 0.0];
    println!("   ρ     h     |est - truth| raw   corrected");
    for rho in [4.0, 8.0, 10.0] {
        let p = make_probe(k, rho)?;
        let ua = cgo_solve(&a, &p, Branch::FORWARD)?;
        let ub = cgo_solve(&b, &p, Branch::PARTNER)?;
        let raw = estimate_mode(&da, &db, &p, &ua, &ub, false)?;
        let fixed = estimate_mode(&da, &db, &p, &ua, &ub, true)?;
        println!(
            "{rho:>5.1} {:>6.3} {:>16.3e} {:>11.3e}",
            p.h,
            raw.error(),
            fixed.error()
        );
    }

    let small = op(PotentialSpec::bump(0.1))?;
    let ds = MatrixFreeDn::new(small, zero)?;
    let r = reconstruct(&ds, &db, DATA_ONLY_RHO, &lattice(4.0 * PI))?;
    println!(
        "{} modes, band-limited relative error {:.3e}",
        r.modes.len(),
        r.band_error()?
    );
    Ok(())
}
