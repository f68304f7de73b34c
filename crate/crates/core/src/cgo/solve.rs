use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use super::probe::{Branch, FrequencyProbe};
use crate::dn::{gamma0, half_norm};
use crate::field::{grad_energy, BoundaryField, NormKind, Normed, ScalarField};
use crate::forward::DiscreteOperator;
use crate::linalg::fgmres;
use crate::{LabError, Result};

/// Admissible semiclassical parameters.
pub const H_WINDOW: (f64, f64) = (0.08, 0.6);
/// Phases are measured from the cube centre to keep `|u|` balanced.
pub const PHASE_CENTER: [f64; 3] = [0.5, 0.5, 0.5];
/// `1 + max_Ω |x|`.
pub const ENVELOPE_C: f64 = 1.0 + 1.732_050_807_568_877_2;

const TOL: f64 = 1e-13;

/// Geometry of the enlarged periodic box `(-1/4, 5/4)³` used for the remainder solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxLayout {
    /// Nodes per side.
    pub m: usize,
    /// Offset of grid node 0 inside the box.
    pub pad: usize,
    /// Axis carrying the half-period twist.
    pub twist_axis: usize,
}

impl BoxLayout {
    pub fn for_grid(n: usize, xi: [f64; 3]) -> Self {
        let pad = n.div_ceil(4);
        let mut t = 0;
        for a in 1..3 {
            if xi[a].abs() > xi[t].abs() {
                t = a;
            }
        }
        BoxLayout {
            m: n + 2 * pad,
            pad,
            twist_axis: t,
        }
    }

    pub fn len(&self) -> usize {
        self.m * self.m * self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.m + j) * self.m + l
    }

    /// `e^{iπ j_t/m}`: the remainder is `v = twist · z` with `z` periodic.
    pub fn twist(&self, ijk: [usize; 3]) -> C64 {
        C64::from_polar(
            1.0,
            std::f64::consts::PI * ijk[self.twist_axis] as f64 / self.m as f64,
        )
    }

    /// Exponent seen by the periodic unknown.
    pub fn twisted_phase(&self, a: [C64; 3], dx: f64) -> [C64; 3] {
        let mut b = a;
        b[self.twist_axis] += C64::new(0.0, std::f64::consts::PI / (self.m as f64 * dx));
        b
    }
}

#[derive(Debug, Clone)]
pub struct CgoSolution {
    pub probe: FrequencyProbe,
    pub branch: Branch,
    /// Discrete exponent `a`; the leading factor is `e^{(x - x_c)·a}`.
    pub phase: [C64; 3],
    pub u: ScalarField,
    pub v: ScalarField,
    pub v_l2: f64,
    /// `(‖v‖² + h²‖∇v‖²)^{1/2}`.
    pub v_h1_scl: f64,
    /// Relative interior residual of `(-Δ_h + V) u`.
    pub residual: f64,
    pub iterations: usize,
    pub layout: BoxLayout,
}

impl CgoSolution {
    pub fn leading(&self, x: [f64; 3]) -> C64 {
        leading(self.phase, x)
    }

    /// Max of `|u e^{-(x-x_c)·a} - 1 - v|`.
    pub fn identity_defect(&self) -> f64 {
        let g = self.u.grid();
        (0..g.node_count())
            .map(|p| {
                let e = self.leading(g.coords(p));
                (self.u.values()[p] / e - 1.0 - self.v.values()[p]).norm()
            })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn leading(a: [C64; 3], x: [f64; 3]) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for j in 0..3 {
        s += a[j] * (x[j] - PHASE_CENTER[j]);
    }
    s.exp()
}

struct Fft3 {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 {
            m,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
        }
    }

    fn run(&self, x: &mut [C64], inverse: bool) {
        let m = self.m;
        let plan = if inverse { &self.inv } else { &self.fwd };
        plan.process(x);
        let mut line = vec![C64::new(0.0, 0.0); m];
        for stride in [m, m * m] {
            for base in 0..m * m {
                // base enumerates the two remaining axes
                let start = if stride == m {
                    (base / m) * m * m + base % m
                } else {
                    base
                };
                for (t, z) in line.iter_mut().enumerate() {
                    *z = x[start + t * stride];
                }
                plan.process(&mut line);
                for (t, z) in line.iter().enumerate() {
                    x[start + t * stride] = *z;
                }
            }
        }
    }
}

/// Twisted-periodic conjugated operator `P_{a'} + V` on the enlarged box.
pub(crate) struct TwistedSystem {
    layout: BoxLayout,
    dx: f64,
    up: [C64; 3],
    down: [C64; 3],
    v: Vec<f64>,
    symbol: Vec<C64>,
    fft: Fft3,
}

impl TwistedSystem {
    fn new(op: &DiscreteOperator, layout: BoxLayout, a: [C64; 3]) -> Result<Self> {
        let g = op.grid();
        let dx = g.dx();
        let m = layout.m;
        let at = layout.twisted_phase(a, dx);
        let up = at.map(|z| (z * dx).exp());
        let down = at.map(|z| (-z * dx).exp());
        let mut v = vec![0.0; layout.len()];
        for p in 0..g.node_count() {
            let [i, j, l] = g.ijk(p);
            v[layout.index(i + layout.pad, j + layout.pad, l + layout.pad)] = op.v()[p];
        }
        let h2 = 1.0 / (dx * dx);
        let theta = |t: usize| 2.0 * std::f64::consts::PI * t as f64 / m as f64;
        let mut symbol = vec![C64::new(0.0, 0.0); layout.len()];
        let (mut smin, mut smax) = (f64::INFINITY, 0.0f64);
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    let mut s = C64::new(0.0, 0.0);
                    for (ax, t) in [i, j, l].into_iter().enumerate() {
                        s += (2.0 - 2.0 * (at[ax] * dx + C64::new(0.0, theta(t))).cosh()) * h2;
                    }
                    smin = smin.min(s.norm());
                    smax = smax.max(s.norm());
                    symbol[layout.index(i, j, l)] = s;
                }
            }
        }
        if !(smin > 1e-12 * smax) {
            return Err(LabError::Domain(format!(
                "periodic symbol nearly singular ({smin:.3e} vs {smax:.3e})"
            )));
        }
        Ok(TwistedSystem {
            layout,
            dx,
            up,
            down,
            v,
            symbol,
            fft: Fft3::new(m),
        })
    }

    fn apply(&self, x: &[C64], out: &mut [C64]) {
        let m = self.layout.m;
        let h2 = 1.0 / (self.dx * self.dx);
        let strides = [m * m, m, 1];
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    let ijk = [i, j, l];
                    let p = self.layout.index(i, j, l);
                    let mut acc = x[p] * (6.0 * h2 + self.v[p]);
                    for ax in 0..3 {
                        let s = strides[ax];
                        let fwd = if ijk[ax] + 1 == m {
                            p + s - m * s
                        } else {
                            p + s
                        };
                        let bwd = if ijk[ax] == 0 { p + m * s - s } else { p - s };
                        acc -= (self.up[ax] * x[fwd] + self.down[ax] * x[bwd]) * h2;
                    }
                    out[p] = acc;
                }
            }
        }
    }

    fn precond(&self, r: &[C64], out: &mut [C64]) {
        out.copy_from_slice(r);
        self.fft.run(out, false);
        let scale = 1.0 / self.layout.len() as f64;
        for (z, s) in out.iter_mut().zip(&self.symbol) {
            *z = *z / *s * scale;
        }
        self.fft.run(out, true);
    }
}

/// Builds `u = e^{(x-x_c)·a}(1 + v)` solving `(-Δ_h + V) u = 0` at interior nodes.
pub fn cgo_solve(
    op: &DiscreteOperator,
    probe: &FrequencyProbe,
    branch: Branch,
) -> Result<CgoSolution> {
    let (lo, hi) = H_WINDOW;
    if !(probe.h >= lo && probe.h <= hi) {
        return Err(LabError::HOutOfRange { h: probe.h, lo, hi });
    }
    let g = op.grid();
    let dx = g.dx();
    let phase = probe.discrete_phase(branch, dx)?;
    let layout = BoxLayout::for_grid(g.n(), probe.xi);
    let sys = TwistedSystem::new(op, layout, phase)?;
    let m = layout.m;
    let mut rhs = vec![C64::new(0.0, 0.0); layout.len()];
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                let p = layout.index(i, j, l);
                if sys.v[p] != 0.0 {
                    rhs[p] = -sys.v[p] / layout.twist([i, j, l]);
                }
            }
        }
    }
    let (z, rep) = fgmres(
        |x, y| sys.apply(x, y),
        |r, y| sys.precond(r, y),
        &rhs,
        TOL,
        40,
        2000,
    );
    if rep.residual > 1e-10 {
        return Err(LabError::NotConverged {
            iterations: rep.iterations,
            residual: rep.residual,
        });
    }
    let mut vv = vec![C64::new(0.0, 0.0); g.node_count()];
    let mut uu = vec![C64::new(0.0, 0.0); g.node_count()];
    for p in 0..g.node_count() {
        let [i, j, l] = g.ijk(p);
        let b = [i + layout.pad, j + layout.pad, l + layout.pad];
        vv[p] = layout.twist(b) * z[layout.index(b[0], b[1], b[2])];
        uu[p] = leading(phase, g.coords(p)) * (1.0 + vv[p]);
    }
    let v = ScalarField::from_nodal(g, vv, true)?;
    let u = ScalarField::from_nodal(g, uu, true)?;
    let v_l2 = v.norm(NormKind::L2)?;
    let v_h1_scl = (v_l2 * v_l2 + probe.h * probe.h * grad_energy(&v)).sqrt();
    let residual = op.relative_residual(&u, C64::new(0.0, 0.0));
    Ok(CgoSolution {
        probe: *probe,
        branch,
        phase,
        u,
        v,
        v_l2,
        v_h1_scl,
        residual,
        iterations: rep.iterations,
        layout,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceBound {
    /// `H^{1/2}` quotient norm of the trace.
    pub norm: f64,
    /// Envelope constant `c` in `‖g‖ ≲ e^{c/h}`.
    pub c: f64,
    pub h: f64,
}

impl TraceBound {
    pub fn envelope(&self) -> f64 {
        (self.c / self.h).exp()
    }
}

pub fn probe_traces(sol: &CgoSolution) -> Result<(BoundaryField, TraceBound)> {
    let g = gamma0(&sol.u)?;
    let norm = half_norm(&g)?;
    Ok((
        g,
        TraceBound {
            norm,
            c: ENVELOPE_C,
            h: sol.probe.h,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgo::make_probe;
    use crate::field::{build_grid, sample_potential, PotentialSpec};
    use crate::forward::assemble;

    fn op(n: usize, amp: f64) -> DiscreteOperator {
        let g = build_grid(n).unwrap();
        let v = sample_potential(&PotentialSpec::bump(amp), &g).unwrap();
        assemble(&v, &g).unwrap()
    }

    #[test]
    fn zero_potential_gives_pure_exponential() {
        let a = op(8, 0.0);
        let p = make_probe([4.0, 0.0, 0.0], 2.0).unwrap();
        let s = cgo_solve(&a, &p, Branch::FORWARD).unwrap();
        assert!(s.v.max_abs() < 1e-10);
        assert!(s.residual < 1e-12, "{}", s.residual);
    }

    #[test]
    fn bump_solution_satisfies_equation() {
        let a = op(8, 1.0);
        let p = make_probe([4.0, 0.0, 0.0], 3.0).unwrap();
        let s = cgo_solve(&a, &p, Branch::PARTNER).unwrap();
        assert!(s.residual < 1e-12, "{}", s.residual);
        assert!(s.identity_defect() < 1e-10);
        assert!(s.v_l2 > 0.0 && s.v_l2 < 1.0);
    }

    #[test]
    fn h_window_enforced() {
        let a = op(6, 1.0);
        let p = make_probe([1.0, 0.0, 0.0], 0.5).unwrap();
        assert!(matches!(
            cgo_solve(&a, &p, Branch::FORWARD),
            Err(LabError::HOutOfRange { .. })
        ));
    }

    #[test]
    fn preconditioner_inverts_free_operator() {
        let a = op(6, 0.0);
        let p = make_probe([2.0, 1.0, 0.0], 2.0).unwrap();
        let ph = p.discrete_phase(Branch::FORWARD, a.grid().dx()).unwrap();
        let lay = BoxLayout::for_grid(6, p.xi);
        let sys = TwistedSystem::new(&a, lay, ph).unwrap();
        let x: Vec<C64> = (0..lay.len())
            .map(|t| C64::new((t as f64 * 0.37).sin(), (t as f64 * 0.11).cos()))
            .collect();
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        let mut z = y.clone();
        sys.apply(&x, &mut y);
        sys.precond(&y, &mut z);
        let err = x
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }
}
