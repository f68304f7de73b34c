//! Krylov and fast-transform kernels shared by the solvers.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64 as C64;

use crate::{LabError, Result};

pub(crate) trait Scalar:
    Copy
    + Send
    + Sync
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Mul<f64, Output = Self>
    + From<f64>
    + 'static
{
    fn conj(self) -> Self;
    fn abs2(self) -> f64;
    fn from_c64(z: C64) -> Self;
    fn zero() -> Self {
        Self::from(0.0)
    }
    fn abs(self) -> f64 {
        self.abs2().sqrt()
    }
}

impl Scalar for f64 {
    fn conj(self) -> Self {
        self
    }
    fn abs2(self) -> f64 {
        self * self
    }
    fn from_c64(z: C64) -> Self {
        z.re
    }
}

impl Scalar for C64 {
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    fn from_c64(z: C64) -> Self {
        z
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    // conj(a)·b
    let mut s = T::zero();
    for (x, y) in a.iter().zip(b) {
        s += x.conj() * *y;
    }
    s
}

pub(crate) fn norm2<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|x| x.abs2()).sum::<f64>().sqrt()
}

fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct KrylovReport {
    pub iterations: usize,
    pub residual: f64,
}

/// Flexible GMRES with right preconditioning. Stops on `‖b - Ax‖ <= tol ‖b‖`.
pub(crate) fn fgmres<T: Scalar>(
    mut apply: impl FnMut(&[T], &mut [T]),
    mut precond: impl FnMut(&[T], &mut [T]),
    b: &[T],
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> (Vec<T>, KrylovReport) {
    let n = b.len();
    let mut x = vec![T::zero(); n];
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return (
            x,
            KrylovReport {
                iterations: 0,
                residual: 0.0,
            },
        );
    }
    let mut r = b.to_vec();
    let mut tmp = vec![T::zero(); n];
    let mut total = 0;
    let mut rel = 1.0;
    while total < max_iter {
        let beta = norm2(&r);
        rel = beta / bnorm;
        if rel <= tol {
            break;
        }
        let mut v: Vec<Vec<T>> = vec![r.iter().map(|&ri| ri * (1.0 / beta)).collect()];
        let mut z: Vec<Vec<T>> = Vec::new();
        let mut hcols: Vec<Vec<T>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<T> = Vec::new();
        let mut g = vec![T::from(beta)];
        let mut k = 0;
        while k < restart && total < max_iter {
            let mut zk = vec![T::zero(); n];
            precond(&v[k], &mut zk);
            let mut w = vec![T::zero(); n];
            apply(&zk, &mut w);
            z.push(zk);
            let mut h = vec![T::zero(); k + 2];
            for _pass in 0..2 {
                for (i, vi) in v.iter().enumerate() {
                    let c = dot(vi, &w);
                    h[i] += c;
                    axpy(-c, vi, &mut w);
                }
            }
            let hn = norm2(&w);
            h[k + 1] = T::from(hn);
            for i in 0..k {
                let (a, bb) = (h[i], h[i + 1]);
                h[i] = a * cs[i] + sn[i] * bb;
                h[i + 1] = -(sn[i].conj()) * a + bb * cs[i];
            }
            let (a, bb) = (h[k], h[k + 1]);
            let r_ = (a.abs2() + bb.abs2()).sqrt();
            let (c, s) = if r_ == 0.0 {
                (1.0, T::zero())
            } else if a.abs() == 0.0 {
                (0.0, bb.conj() * (1.0 / bb.abs()))
            } else {
                (a.abs() / r_, (a * (1.0 / a.abs())) * bb.conj() * (1.0 / r_))
            };
            h[k] = a * c + s * bb;
            h[k + 1] = T::zero();
            cs.push(c);
            sn.push(s);
            let gk = g[k];
            g.push(-(s.conj()) * gk);
            g[k] = gk * c;
            hcols.push(h);
            total += 1;
            k += 1;
            rel = g[k].abs() / bnorm;
            if rel <= tol || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|&wi| wi * (1.0 / hn)).collect());
        }
        // back substitution on the k×k triangle
        let mut y = vec![T::zero(); k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j in i + 1..k {
                s -= hcols[j][i] * y[j];
            }
            y[i] = s / hcols[i][i];
        }
        for (j, zj) in z.iter().enumerate() {
            axpy(y[j], zj, &mut x);
        }
        apply(&x, &mut tmp);
        for i in 0..n {
            r[i] = b[i] - tmp[i];
        }
        rel = norm2(&r) / bnorm;
        if rel <= tol {
            break;
        }
    }
    (
        x,
        KrylovReport {
            iterations: total,
            residual: rel,
        },
    )
}

/// Orthonormal DST-I basis on `n` interior points with its 1D `-D²` eigenvalues.
#[derive(Debug, Clone)]
pub(crate) struct SineBasis {
    pub n: usize,
    s: Vec<f64>,
    pub mu: Vec<f64>,
}

impl SineBasis {
    pub fn new(n: usize, dx: f64) -> Self {
        let scale = (2.0 / (n + 1) as f64).sqrt();
        let mut s = vec![0.0; n * n];
        for q in 0..n {
            for i in 0..n {
                s[q * n + i] = scale * (PI * ((q + 1) * (i + 1)) as f64 / (n + 1) as f64).sin();
            }
        }
        let mu = (0..n)
            .map(|q| 4.0 / (dx * dx) * (PI * (q + 1) as f64 / (2.0 * (n + 1) as f64)).sin().powi(2))
            .collect();
        SineBasis { n, s, mu }
    }

    /// In-place transform along all three axes (self-inverse).
    pub fn transform3<T: Scalar>(&self, x: &mut [T]) {
        let n = self.n;
        let mut line = vec![T::zero(); n];
        let mut out = vec![T::zero(); n];
        for (stride, outer) in [(1usize, n * n), (n, n * n), (n * n, n * n)] {
            for o in 0..outer {
                // base index of line o for this axis
                let base = match stride {
                    1 => o * n,
                    s if s == n => (o / n) * n * n + (o % n),
                    _ => o,
                };
                for i in 0..n {
                    line[i] = x[base + i * stride];
                }
                for q in 0..n {
                    let row = &self.s[q * n..(q + 1) * n];
                    let mut acc = T::zero();
                    for i in 0..n {
                        acc += line[i] * row[i];
                    }
                    out[q] = acc;
                }
                for i in 0..n {
                    x[base + i * stride] = out[i];
                }
            }
        }
    }
}

/// `(P y)_p = diag_p y_p - Σ_a (e^{α_a Δx} y_{p+e_a} + e^{-α_a Δx} y_{p-e_a}) / Δx²` on the
/// `n³` interior of a box with zero Dirichlet data.
///
/// This is `W⁻¹ (A - λ) W` with `W = e^{(x - x_c)·α}`; the preconditioner inverts the
/// constant-coefficient part exactly by sine transforms.
pub(crate) struct DirichletBox<'a, T: Scalar> {
    pub basis: &'a SineBasis,
    pub dx: f64,
    pub diag: Vec<T>,
    pub alpha: [f64; 3],
    pub shift: T,
}

pub(crate) const TOL: f64 = 1e-13;
const RESTART: usize = 40;
const MAX_ITER: usize = 4000;

impl<'a, T: Scalar> DirichletBox<'a, T> {
    fn n(&self) -> usize {
        self.basis.n
    }

    pub fn apply(&self, y: &[T], out: &mut [T]) {
        let n = self.n();
        let h2 = 1.0 / (self.dx * self.dx);
        let f: Vec<f64> = self
            .alpha
            .iter()
            .map(|a| (a * self.dx).exp() * h2)
            .collect();
        let bk: Vec<f64> = self
            .alpha
            .iter()
            .map(|a| (-a * self.dx).exp() * h2)
            .collect();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let p = (i * n + j) * n + l;
                    let mut acc = self.diag[p] * y[p];
                    if i + 1 < n {
                        acc -= y[p + n * n] * f[0];
                    }
                    if i > 0 {
                        acc -= y[p - n * n] * bk[0];
                    }
                    if j + 1 < n {
                        acc -= y[p + n] * f[1];
                    }
                    if j > 0 {
                        acc -= y[p - n] * bk[1];
                    }
                    if l + 1 < n {
                        acc -= y[p + 1] * f[2];
                    }
                    if l > 0 {
                        acc -= y[p - 1] * bk[2];
                    }
                    out[p] = acc;
                }
            }
        }
    }

    fn weight(&self, p: usize) -> f64 {
        let n = self.n();
        let c = [p / (n * n), (p / n) % n, p % n];
        let xc = 0.5 * (n + 1) as f64;
        let e: f64 = (0..3)
            .map(|a| self.alpha[a] * (c[a] as f64 + 1.0 - xc) * self.dx)
            .sum();
        e.exp()
    }

    pub fn precond(&self, r: &[T], out: &mut [T]) {
        let n = self.n();
        let weighted = self.alpha.iter().any(|&a| a != 0.0);
        for p in 0..r.len() {
            out[p] = if weighted {
                r[p] * self.weight(p)
            } else {
                r[p]
            };
        }
        self.basis.transform3(out);
        let mu = &self.basis.mu;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let p = (a * n + b) * n + c;
                    out[p] = out[p] / (T::from(mu[a] + mu[b] + mu[c]) + self.shift);
                }
            }
        }
        self.basis.transform3(out);
        if weighted {
            for (p, o) in out.iter_mut().enumerate() {
                *o = *o * (1.0 / self.weight(p));
            }
        }
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let (x, rep) = fgmres(
            |y, o| self.apply(y, o),
            |r, o| self.precond(r, o),
            b,
            TOL,
            RESTART,
            MAX_ITER,
        );
        if rep.residual > 1e-10 || !rep.residual.is_finite() {
            return Err(LabError::NotConverged {
                iterations: rep.iterations,
                residual: rep.residual,
            });
        }
        Ok(x)
    }
}
