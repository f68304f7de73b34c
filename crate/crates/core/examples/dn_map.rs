//! DN matrices, the gap norm between two potentials and the smoothing of their difference.
use std::sync::Arc;

use dnlab::dn::{assemble_dn, dn_gap_norm, smoothing_index, DnMap, MatrixFreeDn};
use dnlab::field::{build_grid, sample_potential, BoundaryField, PotentialSpec};
use dnlab::forward::assemble;
use dnlab::C64;

fn main() -> dnlab::Result<()> {
    let grid = build_grid(8)?;
    let zero = C64::new(0.0, 0.0);
    let op =
        |s: PotentialSpec| -> dnlab::Result<_> { assemble(&sample_potential(&s, &grid)?, &grid) };
    let base = assemble_dn(&op(PotentialSpec::zero())?, zero)?;
    for c in [0.5, 1.0, 2.0, 4.0] {
        let other = assemble_dn(&op(PotentialSpec::constant(c))?, zero)?;
        println!("V = {c}: gap norm {:.4e}", dn_gap_norm(&base, &other)?);
    }

    let f = BoundaryField::from_fn(&grid, |x| C64::new(x[0] + x[1] * x[2], 0.0));
    let bump = assemble_dn(&op(PotentialSpec::bump(5.0))?, zero)?;
    println!(
        "energy ⟨Λf, f⟩: V=0 {:.5}, bump {:.5}",
        base.apply(&f)?.inner(&f).re,
        bump.apply(&f)?.inner(&f).re
    );
    println!("symmetry defect {:.1e}", bump.symmetry_defect());

    // Matrix-free maps at a finer grid.
    let fine = build_grid(24)?;
    let mf = |s: PotentialSpec| -> dnlab::Result<MatrixFreeDn> {
        MatrixFreeDn::new(
            Arc::new(assemble(&sample_potential(&s, &fine)?, &fine)?),
            zero,
        )
    };
    let r = smoothing_index(&mf(PotentialSpec::zero())?, &mf(PotentialSpec::bump(5.0))?)?;
    println!(
        "smoothing: single {:.3}, difference {:.3}, gap {:.3}",
        r.exponent_single, r.exponent_difference, r.gap
    );
    Ok(())
}
