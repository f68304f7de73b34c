//! Gap norm against potential distance for a scaled family, with the log modulus.
use dnlab::field::PotentialSpec;
use dnlab::inverse::{choose_cutoff, stability_experiment, CUTOFF_C, RHO_MAX};

fn main() -> dnlab::Result<()> {
    let base = PotentialSpec::bump(1.0);
    let pairs: Vec<_> = [0.5, 1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&c| (PotentialSpec::zero(), base.scaled(c)))
        .collect();
    let reps = stability_experiment(&pairs, 2.0, 8)?;
    println!("  ℵ           ‖V - Ṽ‖       Ψ_β(ℵ)      cutoff ρ*");
    for r in &reps {
        println!(
            "{:>10.3e} {:>12.3e} {:>12.4} {:>10}",
            r.aleph,
            r.l2_difference,
            r.psi,
            r.cutoff.map_or("-".into(), |c| format!("{c:.3}"))
        );
    }
    println!(
        "fitted C = {:.3}, all satisfied: {}",
        reps[0].c_fit,
        reps.iter().all(|r| r.satisfied())
    );
    let c = choose_cutoff(1e-6, CUTOFF_C, 0.5, RHO_MAX)?;
    println!("ℵ = 1e-6: ρ* = {:.3}, bound {:.4}", c.rho, c.bound());
    Ok(())
}
