use std::sync::Arc;

use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operator::{DiscreteOperator, DENSE_LIMIT};
use crate::field::{Grid3, ScalarField};
use crate::{LabError, Result};

/// Lowest `m` eigenpairs of `A_V`, eigenfields orthonormal in trapezoid `L²(Ω)`.
#[derive(Debug, Clone)]
pub struct SpectralData {
    grid: Arc<Grid3>,
    values: Vec<f64>,
    /// Column-major `interior × m`.
    vectors: Vec<f64>,
}

impl SpectralData {
    pub fn grid(&self) -> &Arc<Grid3> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Interior samples of `φ_k` (0-based `k`).
    pub fn vector(&self, k: usize) -> &[f64] {
        let n = self.grid.interior_count();
        &self.vectors[k * n..(k + 1) * n]
    }

    pub fn field(&self, k: usize) -> ScalarField {
        let x: Vec<C64> = self.vector(k).iter().map(|&v| C64::new(v, 0.0)).collect();
        ScalarField::from_interior(&self.grid, &x).with_extension()
    }

    /// Max over k of `‖(A - λ_k) φ_k‖_∞ / (|λ_k| + 1)`.
    pub fn max_residual(&self, op: &DiscreteOperator) -> f64 {
        (0..self.len())
            .map(|k| {
                let r = op.interior_residual(&self.field(k), C64::new(self.values[k], 0.0));
                let rn = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
                rn / (self.values[k].abs() + 1.0)
            })
            .fold(0.0, f64::max)
    }

    /// Max deviation of the trapezoid Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let w = self.grid.dx().powi(3);
        let mut worst: f64 = 0.0;
        for j in 0..self.len() {
            for k in j..self.len() {
                let d: f64 = self
                    .vector(j)
                    .iter()
                    .zip(self.vector(k))
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    * w;
                let t = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((d - t).abs());
            }
        }
        worst
    }
}

pub(crate) fn dense_matrix(op: &DiscreteOperator) -> Mat<f64> {
    let g = op.grid();
    let n = g.interior_count();
    let h2 = 1.0 / g.dx().powi(2);
    let v = op.v();
    let mut a = Mat::<f64>::zeros(n, n);
    for (i, &p) in g.interior().iter().enumerate() {
        a[(i, i)] = 6.0 * h2 + v[p];
        for ax in 0..3 {
            let s = g.stride(ax);
            for q in [p + s, p - s] {
                if let Some(j) = g.interior_index(q) {
                    a[(i, j)] = -h2;
                }
            }
        }
    }
    a
}

pub(crate) fn dense_eigenvalues(op: &DiscreteOperator) -> Vec<f64> {
    dense_matrix(op)
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("symmetric eigenvalues")
}

pub fn eigendecompose(op: &DiscreteOperator, m: usize) -> Result<SpectralData> {
    let g = op.grid();
    let n = g.interior_count();
    if m == 0 || m > n {
        return Err(LabError::Invalid(format!("need 1 <= m <= {n}, got {m}")));
    }
    let data = if n <= DENSE_LIMIT {
        dense(op, m)?
    } else {
        lanczos(op, m)?
    };
    if data.len() == n {
        op.seed_dense_eigenvalues(&data.values);
    }
    Ok(data)
}

fn dense(op: &DiscreteOperator, m: usize) -> Result<SpectralData> {
    let g = op.grid();
    let n = g.interior_count();
    let evd = dense_matrix(op)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| LabError::NotConverged {
            iterations: 0,
            residual: f64::NAN,
        })?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let scale = g.dx().powf(-1.5);
    let values = (0..m).map(|k| s[k]).collect();
    let mut vectors = Vec::with_capacity(n * m);
    for k in 0..m {
        // fix the sign: first significant entry positive
        let col: Vec<f64> = (0..n).map(|i| u[(i, k)]).collect();
        let piv = col.iter().cloned().find(|x| x.abs() > 1e-8).unwrap_or(1.0);
        let sg = if piv < 0.0 { -scale } else { scale };
        vectors.extend(col.iter().map(|x| x * sg));
    }
    Ok(SpectralData {
        grid: g.clone(),
        values,
        vectors,
    })
}

/// Block shift-invert Lanczos with full reorthogonalisation.
///
/// The shift sits below the Weyl lower bound `μ₁ + min V`, so every inner solve is
/// symmetric positive definite.
fn lanczos(op: &DiscreteOperator, m: usize) -> Result<SpectralData> {
    let g = op.grid();
    let n = g.interior_count();
    let block = 12;
    let (vmin, _) = op.v_range();
    let mu1 = op.laplacian_spectrum()[0];
    let sigma = mu1 + vmin - (0.5 * mu1).max(1.0);
    let max_dim = (6 * m + 120).max(480).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    let mut q: Vec<Vec<f64>> = Vec::new();
    // tridiagonal blocks stored densely in t (grown as needed)
    let mut t = vec![0.0; max_dim * max_dim];
    let mut start: Vec<Vec<f64>> = (0..block)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    orthonormalize(&mut start, &q, &mut rng);
    q.extend(start);
    let mut k0 = 0usize;
    let mut result = None;
    while q.len() + block <= max_dim {
        let cur = k0..k0 + block;
        let mut w: Vec<Vec<f64>> = Vec::with_capacity(block);
        for j in cur.clone() {
            w.push(op.solve_interior_real(sigma, &q[j])?);
        }
        // projections onto the current and all previous blocks
        for (bi, wi) in w.iter_mut().enumerate() {
            for _ in 0..2 {
                for (j, qj) in q.iter().enumerate() {
                    let c: f64 = qj.iter().zip(wi.iter()).map(|(a, b)| a * b).sum();
                    if j >= k0 {
                        t[j * max_dim + (k0 + bi)] += c;
                    }
                    for (x, y) in wi.iter_mut().zip(qj) {
                        *x -= c * y;
                    }
                }
            }
        }
        // QR of the remainder gives the next block and the subdiagonal coupling
        let r = qr_in_place(&mut w, &q, &mut rng);
        let k1 = k0 + block;
        for i in 0..block {
            for j in 0..block {
                t[(k1 + i) * max_dim + (k0 + j)] = r[i * block + j];
                t[(k0 + j) * max_dim + (k1 + i)] = r[i * block + j];
            }
        }
        q.extend(w);
        k0 = k1;
        let dim = k0;
        if dim >= m + block && (dim / block) % 4 == 0 {
            let tm = Mat::<f64>::from_fn(dim, dim, |i, j| {
                0.5 * (t[i * max_dim + j] + t[j * max_dim + i])
            });
            let evd = tm
                .self_adjoint_eigen(Side::Lower)
                .map_err(|_| LabError::NotConverged {
                    iterations: dim,
                    residual: f64::NAN,
                })?;
            let s = evd.S().column_vector();
            let u = evd.U();
            // largest θ ↔ smallest λ; residual bound ‖B_j s_last‖
            let mut ok = true;
            for idx in 0..m {
                let col = dim - 1 - idx;
                let theta = s[col];
                let mut res2 = 0.0;
                for i in 0..block {
                    let mut acc = 0.0;
                    for j in 0..block {
                        acc +=
                            t[(k0 + i) * max_dim + (dim - block + j)] * u[(dim - block + j, col)];
                    }
                    res2 += acc * acc;
                }
                if res2.sqrt() > 1e-11 * theta.abs() {
                    ok = false;
                }
            }
            if ok {
                let scale = g.dx().powf(-1.5);
                let mut values = Vec::with_capacity(m);
                let mut vectors = Vec::with_capacity(n * m);
                for idx in 0..m {
                    let col = dim - 1 - idx;
                    values.push(sigma + 1.0 / s[col]);
                    let mut x = vec![0.0; n];
                    for (j, qj) in q.iter().take(dim).enumerate() {
                        let c = u[(j, col)];
                        for (xi, qi) in x.iter_mut().zip(qj) {
                            *xi += c * qi;
                        }
                    }
                    let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let piv = x
                        .iter()
                        .cloned()
                        .find(|v| v.abs() > 1e-8 * nrm)
                        .unwrap_or(1.0);
                    let sg = if piv < 0.0 { -scale / nrm } else { scale / nrm };
                    vectors.extend(x.iter().map(|v| v * sg));
                }
                result = Some(SpectralData {
                    grid: g.clone(),
                    values,
                    vectors,
                });
                break;
            }
        }
    }
    result.ok_or(LabError::NotConverged {
        iterations: max_dim,
        residual: f64::NAN,
    })
}

fn orthonormalize(w: &mut [Vec<f64>], q: &[Vec<f64>], rng: &mut ChaCha8Rng) {
    let _ = qr_in_place(w, q, rng);
}

/// Modified Gram-Schmidt QR of `w` against `q` and itself; returns `R` row-major.
/// Rank-deficient columns are replaced by random directions.
fn qr_in_place(w: &mut [Vec<f64>], q: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let b = w.len();
    let mut r = vec![0.0; b * b];
    for i in 0..b {
        for j in 0..i {
            for _ in 0..2 {
                let c: f64 = w[j].iter().zip(&w[i]).map(|(a, b)| a * b).sum();
                r[j * b + i] += c;
                let (lo, hi) = w.split_at_mut(i);
                for (x, y) in hi[0].iter_mut().zip(&lo[j]) {
                    *x -= c * y;
                }
            }
        }
        let mut nrm = w[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        r[i * b + i] = nrm;
        let scale = w[i].iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
        if nrm <= 1e-10 * scale * (w[i].len() as f64).sqrt() || nrm == 0.0 {
            r[i * b + i] = 0.0;
            let mut fresh: Vec<f64> = (0..w[i].len())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            for _ in 0..2 {
                for qj in q.iter().chain(w[..i].iter()) {
                    let c: f64 = qj.iter().zip(&fresh).map(|(a, b)| a * b).sum();
                    for (x, y) in fresh.iter_mut().zip(qj) {
                        *x -= c * y;
                    }
                }
            }
            w[i] = fresh;
            nrm = w[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        }
        for x in w[i].iter_mut() {
            *x /= nrm;
        }
    }
    r
}
