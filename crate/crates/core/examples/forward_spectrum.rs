//! Lowest Dirichlet eigenvalues, the Weyl slope and one boundary value problem.
use dnlab::field::{build_grid, sample_potential, BoundaryField, PotentialSpec};
use dnlab::forward::{assemble, eigendecompose, weyl_fit};
use dnlab::C64;

fn main() -> dnlab::Result<()> {
    let grid = build_grid(16)?;
    let v = sample_potential(&PotentialSpec::bump(10.0), &grid)?;
    let op = assemble(&v, &grid)?;

    let spec = eigendecompose(&op, 120)?;
    let free = op.laplacian_spectrum();
    println!(" k   λ_k(V)      λ_k(0)");
    for k in [0, 1, 2, 3, 9, 49, 119] {
        println!(
            "{:>3} {:>10.4} {:>10.4}",
            k + 1,
            spec.eigenvalues()[k],
            free[k]
        );
    }
    println!("eigen residual {:.2e}", spec.max_residual(&op));
    println!(
        "Weyl slope over [10, 120]: {:.4} (continuum 2/3)",
        weyl_fit(&spec, 10, 120)?
    );

    let f = BoundaryField::from_fn(&grid, |x| C64::new(x[0] * x[1], 0.0));
    let lam = C64::new(5.0, 1.0);
    let u = op.solve_dirichlet(lam, &f)?;
    println!(
        "Dirichlet solve at λ = {lam}: relative residual {:.2e}",
        op.relative_residual(&u, lam)
    );
    Ok(())
}
