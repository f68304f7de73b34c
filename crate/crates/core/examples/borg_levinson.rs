//! Boundary spectral data, the resolvent series for DN derivatives, its tail, and the
//! large-μ decay of the DN difference.
use dnlab::dn::{assemble_dn, DnMap};
use dnlab::field::{build_grid, sample_potential, BoundaryField, PotentialSpec};
use dnlab::forward::{assemble, eigendecompose};
use dnlab::spectral::{boundary_spectral_data, large_mu_gap, series_dn, series_tail, tail_slope};
use dnlab::C64;

fn main() -> dnlab::Result<()> {
    let grid = build_grid(8)?;
    let op = assemble(&sample_potential(&PotentialSpec::bump(5.0), &grid)?, &grid)?;
    let spec = eigendecompose(&op, grid.interior_count())?;
    let bsd = boundary_spectral_data(&spec, &op)?;
    println!(
        "{} eigenpairs, trace growth exponent {:.3}",
        bsd.len(),
        bsd.growth_exponent()
    );

    let lam = 10.0;
    let f = BoundaryField::from_fn(&grid, |x| C64::new(x[0] - x[1] * x[2], 0.0));
    let direct = assemble_dn(&op, C64::new(lam, 0.0))?.apply(&f)?;
    let series = series_dn(&op, &bsd, lam, 0, &f)?;
    println!(
        "series vs direct DN map: {:.2e}",
        series.sub(&direct)?.max_abs() / direct.max_abs()
    );

    for m in 1..=3 {
        let tail = series_tail(&bsd, lam, m, &f, &[10, 20, 40, 80, 160, 320])?;
        println!("order {m}: tail slope {:.3}", tail_slope(&tail));
    }

    let free = assemble(&sample_potential(&PotentialSpec::zero(), &grid)?, &grid)?;
    for (mu, gap) in large_mu_gap(&op, &free, &[2.0, 4.0, 8.0, 16.0])? {
        println!("μ = {mu:>4}: gap {gap:.3e}");
    }
    Ok(())
}
