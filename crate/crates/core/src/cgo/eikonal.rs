use serde::{Deserialize, Serialize};

use super::probe::{dot, norm};
use crate::forward::loglog_slope;
use crate::{LabError, Result};

/// Symbolic phase functions for limiting Carleman weight checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "kebab-case")]
pub enum Phase {
    /// `x·d`
    Linear { direction: [f64; 3] },
    /// `log|x - x₀|`
    Log { center: [f64; 3] },
    /// `x_axis`
    Coordinate { axis: usize },
    /// Distance to the line through `point` along `direction`.
    Radial {
        point: [f64; 3],
        direction: [f64; 3],
    },
}

const MARGIN: f64 = 1e-9;

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Whether the line `p + t d` meets the closed unit cube (slab test).
fn line_hits_cube(p: [f64; 3], d: [f64; 3]) -> bool {
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for a in 0..3 {
        let (lo, hi) = (-MARGIN - p[a], 1.0 + MARGIN - p[a]);
        if d[a] == 0.0 {
            if lo > 0.0 || hi < 0.0 {
                return false;
            }
        } else {
            let (s0, s1) = (lo / d[a], hi / d[a]);
            t0 = t0.max(s0.min(s1));
            t1 = t1.min(s0.max(s1));
        }
    }
    t0 <= t1
}

impl Phase {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Phase::Linear { direction } if norm(direction) == 0.0 => {
                Err(LabError::Invalid("linear phase with zero direction".into()))
            }
            Phase::Coordinate { axis } if axis > 2 => {
                Err(LabError::Invalid(format!("axis {axis}")))
            }
            Phase::Log { center }
                if center.iter().all(|c| (-MARGIN..=1.0 + MARGIN).contains(c)) =>
            {
                Err(LabError::DomainViolation(format!(
                    "log singularity {center:?} in the closed cube"
                )))
            }
            Phase::Radial { direction, .. } if norm(direction) == 0.0 => Err(LabError::Invalid(
                "radial phase with zero axis direction".into(),
            )),
            Phase::Radial { point, direction } if line_hits_cube(point, direction) => Err(
                LabError::DomainViolation(format!("radial axis through {point:?} meets the cube")),
            ),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        match *self {
            Phase::Linear { direction } => dot(x, direction),
            Phase::Log { center } => norm(sub(x, center)).ln(),
            Phase::Coordinate { axis } => x[axis],
            Phase::Radial { point, direction } => {
                let d = norm(direction);
                let r = sub(x, point);
                let t = dot(r, direction) / (d * d);
                norm([
                    r[0] - t * direction[0],
                    r[1] - t * direction[1],
                    r[2] - t * direction[2],
                ])
            }
        }
    }

    fn central_gradient(&self, x: [f64; 3], dx: f64) -> [f64; 3] {
        let mut g = [0.0; 3];
        for a in 0..3 {
            let (mut xp, mut xm) = (x, x);
            xp[a] += dx;
            xm[a] -= dx;
            g[a] = (self.eval(xp) - self.eval(xm)) / (2.0 * dx);
        }
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EikonalReport {
    pub n: usize,
    /// `max | |∇φ|² - |∇ψ|² |`
    pub norm_residual: f64,
    /// `max |∇φ·∇ψ|`
    pub dot_residual: f64,
}

impl EikonalReport {
    pub fn max_residual(&self) -> f64 {
        self.norm_residual.max(self.dot_residual)
    }
}

/// Central-difference residuals of the eikonal pair at the interior nodes of an `N`-grid.
pub fn eikonal_check(phi: &Phase, psi: &Phase, n: usize) -> Result<EikonalReport> {
    phi.validate()?;
    psi.validate()?;
    if n < 2 {
        return Err(LabError::Invalid(format!("grid size {n}")));
    }
    let dx = 1.0 / n as f64;
    let (mut nr, mut dr) = (0.0f64, 0.0f64);
    for i in 1..n {
        for j in 1..n {
            for l in 1..n {
                let x = [i as f64 * dx, j as f64 * dx, l as f64 * dx];
                let gp = phi.central_gradient(x, dx);
                let gq = psi.central_gradient(x, dx);
                nr = nr.max((dot(gp, gp) - dot(gq, gq)).abs());
                dr = dr.max(dot(gp, gq).abs());
            }
        }
    }
    Ok(EikonalReport {
        n,
        norm_residual: nr,
        dot_residual: dr,
    })
}

/// Log-log slope of the max residual against `Δx` over the given grids.
pub fn refinement_slope(phi: &Phase, psi: &Phase, grids: &[usize]) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &n in grids {
        let r = eikonal_check(phi, psi, n)?;
        xs.push(1.0 / n as f64);
        ys.push(r.max_residual());
    }
    Ok(loglog_slope(&xs, &ys))
}
