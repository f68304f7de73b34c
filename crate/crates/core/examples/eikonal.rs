//! Finite-difference checks of the eikonal pair |∇φ| = |∇ψ|, ∇φ·∇ψ = 0.
use dnlab::cgo::{eikonal_check, refinement_slope, Phase};

fn main() -> dnlab::Result<()> {
    let pairs = [
        (
            "plane",
            Phase::Linear {
                direction: [0.0, 0.0, 1.0],
            },
            Phase::Linear {
                direction: [0.6, 0.8, 0.0],
            },
        ),
        (
            "cylindrical",
            Phase::Coordinate { axis: 0 },
            Phase::Radial {
                point: [0.0, -0.5, -0.5],
                direction: [1.0, 0.0, 0.0],
            },
        ),
    ];
    for (name, phi, psi) in &pairs {
        for n in [8, 16, 32] {
            let r = eikonal_check(phi, psi, n)?;
            println!(
                "{name:>12} N={n:<3} norm {:.2e}  dot {:.2e}",
                r.norm_residual, r.dot_residual
            );
        }
    }
    // The plane pair is exact, so only the curved pair has a meaningful rate.
    let (_, phi, psi) = &pairs[1];
    println!(
        "cylindrical refinement slope {:.3}",
        refinement_slope(phi, psi, &[8, 16, 32, 64])?
    );
    // A log weight centred inside the cube is refused.
    let bad = Phase::Log { center: [0.5; 3] };
    println!("log centre inside: {}", bad.validate().unwrap_err());
    Ok(())
}
