use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::{Grid3, ScalarField};

/// Trapezoid quadrature of `∫_Ω field e^{-ik·x} dx`.
pub fn fourier_mode(field: &ScalarField, k: [f64; 3]) -> C64 {
    let g = field.grid();
    field
        .values()
        .iter()
        .enumerate()
        .map(|(p, &z)| {
            let x = g.coords(p);
            let ph = -(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            z * C64::from_polar(g.volume_weight(p), ph)
        })
        .sum()
}

/// Frequencies `2π n`, `n ∈ Z³`, with `|2π n| <= radius`, in lexicographic order of `n`.
pub fn lattice(radius: f64) -> Vec<[f64; 3]> {
    let r = (radius / (2.0 * PI) + 1e-9).floor() as i64;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let k = [
                    2.0 * PI * a as f64,
                    2.0 * PI * b as f64,
                    2.0 * PI * c as f64,
                ];
                if (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt() <= radius * (1.0 + 1e-12) {
                    out.push(k);
                }
            }
        }
    }
    out
}

/// `Σ c_k e^{ik·x}` on every node.
pub fn synthesize(grid: &Arc<Grid3>, modes: &[([f64; 3], C64)]) -> ScalarField {
    ScalarField::from_fn(grid, |x| {
        modes
            .iter()
            .map(|(k, c)| c * C64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]))
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_grid;

    #[test]
    fn examples() {
        let g = build_grid(32).unwrap();
        let zero = ScalarField::zeros(&g);
        assert_eq!(fourier_mode(&zero, [1.0, 2.0, 3.0]).norm(), 0.0);
        let one = ScalarField::from_real_fn(&g, |_| 1.0);
        assert!((fourier_mode(&one, [0.0; 3]) - 1.0).norm() < 1e-10);
        assert!(fourier_mode(&one, [2.0 * PI, 0.0, 0.0]).norm() < 1e-3);
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(lattice(0.0).len(), 1);
        assert_eq!(lattice(2.0 * PI).len(), 7);
        assert_eq!(lattice(4.0 * PI).len(), 33);
    }
}
