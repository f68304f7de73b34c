//! Sample potentials on a grid, measure them, truncate, take Fourier modes and export.
use std::f64::consts::PI;

use dnlab::field::{
    build_grid, export_field, fourier_mode, norm, sample_potential, truncate, Law, NormKind,
    PotentialSpec, P_LOWER, P_UPPER,
};

fn main() -> dnlab::Result<()> {
    let grid = build_grid(24)?;
    let bump = sample_potential(&PotentialSpec::bump(5.0), &grid)?;
    let rough = sample_potential(
        &PotentialSpec::rough(
            7,
            Law::Normal {
                mean: 0.0,
                std: 1.0,
            },
            0.4,
        ),
        &grid,
    )?;

    for (name, v) in [("bump", &bump), ("rough", &rough)] {
        println!(
            "{name:>5}: max {:.3}  L2 {:.4}  L6/5 {:.4}  L6 {:.4}  H1 {:.4}",
            v.max_abs(),
            norm(v, NormKind::L2)?,
            norm(v, NormKind::Lp(P_LOWER))?,
            norm(v, NormKind::Lp(P_UPPER))?,
            norm(v, NormKind::H1)?,
        );
    }

    let t = truncate(&rough, 1.0)?;
    println!(
        "rough clipped at 1: max {:.3}, L2 {:.4}",
        t.max_abs(),
        norm(&t, NormKind::L2)?
    );

    for k in [[0.0; 3], [2.0 * PI, 0.0, 0.0], [2.0 * PI, 2.0 * PI, 0.0]] {
        println!("bump mode at {k:?}: {:.6}", fourier_mode(&bump, k));
    }

    let path = std::env::temp_dir().join("dnlab-bump.bin");
    export_field(&bump, &path, serde_json::json!({ "spec": "bump(5)" }))?;
    println!("exported to {} (+ .json sidecar)", path.display());
    Ok(())
}
