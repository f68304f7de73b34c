//! CGO solutions for one frequency over a sweep of h; the remainder shrinks like h.
use dnlab::cgo::{cgo_solve, make_probe, probe_traces, Branch};
use dnlab::field::{build_grid, sample_potential, PotentialSpec};
use dnlab::forward::{assemble, loglog_slope};

fn main() -> dnlab::Result<()> {
    let grid = build_grid(24)?;
    let op = assemble(&sample_potential(&PotentialSpec::bump(10.0), &grid)?, &grid)?;
    let k = [4.0, 0.0, 0.0];
    let (mut hs, mut vs) = (Vec::new(), Vec::new());
    println!("   ρ      h      ‖v‖      h-scaled H1   ‖γ₀u‖_H½   iters");
    for rho in [2.0, 3.0, 4.5, 6.5, 9.0] {
        let probe = make_probe(k, rho)?;
        let sol = cgo_solve(&op, &probe, Branch::FORWARD)?;
        let (_, bound) = probe_traces(&sol)?;
        println!(
            "{rho:>5.1} {:>6.3} {:>10.3e} {:>12.3e} {:>11.3e} {:>6}",
            probe.h, sol.v_l2, sol.v_h1_scl, bound.norm, sol.iterations
        );
        hs.push(probe.h);
        vs.push(sol.v_l2);
    }
    println!(
        "log-log slope of ‖v‖ against h: {:.3}",
        loglog_slope(&hs, &vs)
    );
    Ok(())
}
