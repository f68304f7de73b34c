use std::fmt;

use super::{BoundaryField, ScalarField};
use crate::{LabError, Result};

/// Lebesgue exponents singled out by the Sobolev embeddings in three dimensions.
pub const P_LOWER: f64 = 6.0 / 5.0;
pub const P_UPPER: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    L2,
    Lp(f64),
    H1,
    H10,
    HhalfQuotient,
    HminushalfDual,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormKind::L2 => write!(f, "L2"),
            NormKind::Lp(p) => write!(f, "L{p}"),
            NormKind::H1 => write!(f, "H1"),
            NormKind::H10 => write!(f, "H1_0"),
            NormKind::HhalfQuotient => write!(f, "H1/2"),
            NormKind::HminushalfDual => write!(f, "H-1/2"),
        }
    }
}

pub trait Normed {
    fn norm(&self, kind: NormKind) -> Result<f64>;
}

pub fn norm<F: Normed + ?Sized>(field: &F, kind: NormKind) -> Result<f64> {
    field.norm(kind)
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(LabError::UnsupportedNorm(format!("Lp with p = {p}")))
    }
}

/// `Σ c_e Δx |u_p - u_q|²`, the trapezoid Dirichlet energy.
pub fn grad_energy(u: &ScalarField) -> f64 {
    let g = u.grid();
    let v = u.values();
    let mut s = 0.0;
    g.for_each_edge(|p, q, c| s += c * (v[p] - v[q]).norm_sqr());
    s * g.dx()
}

impl Normed for ScalarField {
    fn norm(&self, kind: NormKind) -> Result<f64> {
        let w = self.grid().volume_weights();
        let lp = |p: f64| -> f64 {
            self.values()
                .iter()
                .zip(w)
                .map(|(z, w)| w * z.norm().powf(p))
                .sum::<f64>()
                .powf(1.0 / p)
        };
        match kind {
            NormKind::L2 => Ok(lp(2.0)),
            NormKind::Lp(p) => {
                check_p(p)?;
                Ok(lp(p))
            }
            NormKind::H1 => Ok((lp(2.0).powi(2) + grad_energy(self)).sqrt()),
            NormKind::H10 => Ok(grad_energy(self).sqrt()),
            k => Err(LabError::UnsupportedNorm(format!(
                "{k} on an interior field"
            ))),
        }
    }
}

impl Normed for BoundaryField {
    fn norm(&self, kind: NormKind) -> Result<f64> {
        match kind {
            NormKind::L2 => Ok(self.l2()),
            NormKind::Lp(p) => {
                check_p(p)?;
                Ok(self
                    .values()
                    .iter()
                    .zip(self.grid().boundary())
                    .map(|(z, b)| b.weight * z.norm().powf(p))
                    .sum::<f64>()
                    .powf(1.0 / p))
            }
            NormKind::HhalfQuotient => crate::dn::half_norm(self),
            NormKind::HminushalfDual => crate::dn::BoundaryGram::of(self.grid())?.norm(self, -0.5),
            k => Err(LabError::UnsupportedNorm(format!(
                "{k} on a boundary field"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_grid;
    use num_complex::Complex64 as C64;

    #[test]
    fn constant_one_has_unit_l2() {
        let g = build_grid(6).unwrap();
        let one = ScalarField::from_real_fn(&g, |_| 1.0);
        assert!((one.norm(NormKind::L2).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn linear_h1() {
        let g = build_grid(16).unwrap();
        let x1 = ScalarField::from_real_fn(&g, |x| x[0]);
        let h1 = x1.norm(NormKind::H1).unwrap();
        let exact = (1.0f64 / 3.0 + 1.0).sqrt();
        assert!((h1 - exact).abs() / exact < 0.02);
        assert!((x1.norm(NormKind::H10).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_exponent_and_kind() {
        let g = build_grid(4).unwrap();
        let u = ScalarField::zeros(&g);
        assert!(u.norm(NormKind::Lp(1.0)).is_err());
        assert!(u.norm(NormKind::HhalfQuotient).is_err());
        let f = BoundaryField::from_fn(&g, |_| C64::new(1.0, 0.0));
        assert!(f.norm(NormKind::H1).is_err());
        assert!((f.norm(NormKind::L2).unwrap() - 6f64.sqrt()).abs() < 1e-12);
    }
}
