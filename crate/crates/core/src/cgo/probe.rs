use num_complex::Complex64 as C64;

use crate::{LabError, Result};

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Unit vector orthogonal to `k`, by Gram-Schmidt from the canonical basis vector
/// least aligned with `k` (lowest axis on ties).
pub(crate) fn orthogonal_unit(k: [f64; 3]) -> [f64; 3] {
    let kn = norm(k);
    let khat = scale(k, 1.0 / kn);
    let mut axis = 0;
    for a in 1..3 {
        if k[a].abs() < k[axis].abs() {
            axis = a;
        }
    }
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let c = dot(e, khat);
    let v = [e[0] - c * khat[0], e[1] - c * khat[1], e[2] - c * khat[2]];
    scale(v, 1.0 / norm(v))
}

/// CGO frequency geometry for one target frequency `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyProbe {
    pub k: [f64; 3],
    pub rho: f64,
    /// Unit decay direction.
    pub xi: [f64; 3],
    /// Auxiliary frequency, `|k̃| = ρ`.
    pub ktilde: [f64; 3],
    pub h: f64,
    pub zeta: [f64; 3],
    pub zeta_tilde: [f64; 3],
}

pub fn make_probe(k: [f64; 3], rho: f64) -> Result<FrequencyProbe> {
    if norm(k) == 0.0 {
        return Err(LabError::ZeroFrequency);
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(LabError::Invalid(format!(
            "auxiliary magnitude must be > 0, got {rho}"
        )));
    }
    let kt_dir = orthogonal_unit(k);
    let ktilde = scale(kt_dir, rho);
    let khat = scale(k, 1.0 / norm(k));
    let xi = cross(khat, kt_dir);
    let h = 1.0 / (dot(k, k) / 4.0 + rho * rho).sqrt();
    let zeta = [0, 1, 2].map(|a| h * (k[a] / 2.0 + ktilde[a]));
    let zeta_tilde = [0, 1, 2].map(|a| h * (k[a] / 2.0 - ktilde[a]));
    Ok(FrequencyProbe {
        k,
        rho,
        xi,
        ktilde,
        h,
        zeta,
        zeta_tilde,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frequency {
    Zeta,
    ZetaTilde,
}

/// Selects the leading exponential `e^{-x·(sξ + iζ)/h}` (or with `ζ̃`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Branch {
    pub sign: Sign,
    pub freq: Frequency,
}

impl Branch {
    /// `(+ξ, ζ)`: first factor of the product that isolates `e^{-ix·k}`.
    pub const FORWARD: Branch = Branch {
        sign: Sign::Plus,
        freq: Frequency::Zeta,
    };
    /// `(-ξ, ζ̃)`: its partner.
    pub const PARTNER: Branch = Branch {
        sign: Sign::Minus,
        freq: Frequency::ZetaTilde,
    };

    pub fn flipped(self) -> Branch {
        let sign = match self.sign {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        };
        Branch { sign, ..self }
    }
}

impl FrequencyProbe {
    /// Continuum exponent `a = -(sξ + iζ)/h`, so the leading factor is `e^{x·a}`.
    pub fn continuum_phase(&self, branch: Branch) -> [C64; 3] {
        let s = if branch.sign == Sign::Plus { 1.0 } else { -1.0 };
        let z = if branch.freq == Frequency::Zeta {
            self.zeta
        } else {
            self.zeta_tilde
        };
        [0, 1, 2].map(|a| C64::new(-s * self.xi[a] / self.h, -z[a] / self.h))
    }

    /// Exponent `a` with `e^{x·a}` exactly harmonic for the 7-point Laplacian of spacing
    /// `dx`, within `O(dx²)` of the continuum exponent; `FORWARD + PARTNER = -ik` exactly.
    pub fn discrete_phase(&self, branch: Branch, dx: f64) -> Result<[C64; 3]> {
        let b = self.discrete_b(dx)?;
        let bb = match (branch.sign, branch.freq) {
            (Sign::Plus, Frequency::Zeta) => b,
            (Sign::Minus, Frequency::ZetaTilde) => b.map(|z| -z),
            (Sign::Plus, Frequency::ZetaTilde) => b.map(|z| z.conj()),
            (Sign::Minus, Frequency::Zeta) => b.map(|z| -z.conj()),
        };
        Ok([0, 1, 2].map(|a| C64::new(0.0, -self.k[a] / 2.0) + bb[a]))
    }

    /// Newton solve (minimum-norm steps) of
    /// `Σ cos(k_j dx/2) cosh(b_j dx) = 3`, `Σ sin(k_j dx/2) sinh(b_j dx) = 0`.
    fn discrete_b(&self, dx: f64) -> Result<[C64; 3]> {
        let mut b: [C64; 3] = [0, 1, 2].map(|a| C64::new(-self.xi[a] / self.h, -self.ktilde[a]));
        let c: [f64; 3] = self.k.map(|k| (k * dx / 2.0).cos());
        let s: [f64; 3] = self.k.map(|k| (k * dx / 2.0).sin());
        let resid = |b: &[C64; 3]| -> [C64; 2] {
            let mut f1 = C64::new(-3.0, 0.0);
            let mut f2 = C64::new(0.0, 0.0);
            for j in 0..3 {
                f1 += c[j] * (b[j] * dx).cosh();
                f2 += s[j] * (b[j] * dx).sinh();
            }
            [f1, f2]
        };
        let scale: f64 = (0..3).map(|j| (b[j] * dx).cosh().norm()).sum::<f64>();
        for _ in 0..60 {
            let f = resid(&b);
            if f[0].norm() + f[1].norm() <= 1e-15 * scale {
                return Ok(b);
            }
            let mut jac = [[C64::new(0.0, 0.0); 3]; 2];
            for j in 0..3 {
                jac[0][j] = c[j] * (b[j] * dx).sinh() * dx;
                jac[1][j] = s[j] * (b[j] * dx).cosh() * dx;
            }
            // (J Jᴴ) y = F, δ = -Jᴴ y
            let mut g = [[C64::new(0.0, 0.0); 2]; 2];
            for r in 0..2 {
                for q in 0..2 {
                    g[r][q] = (0..3).map(|j| jac[r][j] * jac[q][j].conj()).sum();
                }
            }
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            if det.norm() == 0.0 {
                return Err(LabError::Domain(
                    "degenerate discrete phase Jacobian".into(),
                ));
            }
            let y0 = (g[1][1] * f[0] - g[0][1] * f[1]) / det;
            let y1 = (g[0][0] * f[1] - g[1][0] * f[0]) / det;
            for j in 0..3 {
                b[j] -= jac[0][j].conj() * y0 + jac[1][j].conj() * y1;
            }
        }
        let f = resid(&b);
        if f[0].norm() + f[1].norm() <= 1e-12 * scale {
            Ok(b)
        } else {
            Err(LabError::NotConverged {
                iterations: 60,
                residual: f[0].norm() + f[1].norm(),
            })
        }
    }
}
