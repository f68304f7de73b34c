use std::sync::{Arc, OnceLock};

use crate::{LabError, Result};

/// Node on Γ with its canonical owner face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    /// Flat node index.
    pub node: usize,
    pub ijk: [usize; 3],
    /// Axis of the owner face (first boundary axis in lexicographic order).
    pub axis: usize,
    /// Outward normal sign along `axis`.
    pub sign: i8,
    /// Surface quadrature weight, summed over every face containing the node.
    pub weight: f64,
}

/// Uniform node grid on the closed unit cube with `N` cells per axis.
///
/// Nodes are indexed `(i*(N+1) + j)*(N+1) + l`, z fastest. Volume weights are the
/// tensor trapezoid rule, so interior nodes carry `Δx³` and the weights sum to one.
#[derive(Debug)]
pub struct Grid3 {
    n: usize,
    dx: f64,
    boundary: Vec<BoundaryNode>,
    boundary_of: Vec<u32>,
    interior: Vec<usize>,
    interior_of: Vec<u32>,
    volume: Vec<f64>,
    pub(crate) gram: OnceLock<Arc<crate::dn::BoundaryGram>>,
}

const NONE: u32 = u32::MAX;

pub fn build_grid(n: usize) -> Result<Arc<Grid3>> {
    Grid3::new(n).map(Arc::new)
}

impl Grid3 {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(LabError::Config(format!("grid needs N >= 4, got {n}")));
        }
        let dx = 1.0 / n as f64;
        let np = n + 1;
        let total = np * np * np;
        let mut boundary = Vec::new();
        let mut boundary_of = vec![NONE; total];
        let mut interior = Vec::with_capacity((n - 1).pow(3));
        let mut interior_of = vec![NONE; total];
        let mut volume = vec![0.0; total];
        let t = |c: usize| if c == 0 || c == n { 0.5 } else { 1.0 };
        for i in 0..np {
            for j in 0..np {
                for l in 0..np {
                    let p = (i * np + j) * np + l;
                    let ijk = [i, j, l];
                    volume[p] = dx.powi(3) * t(i) * t(j) * t(l);
                    let on: Vec<usize> = (0..3).filter(|&a| ijk[a] == 0 || ijk[a] == n).collect();
                    if on.is_empty() {
                        interior_of[p] = interior.len() as u32;
                        interior.push(p);
                        continue;
                    }
                    let axis = on[0];
                    let sign = if ijk[axis] == 0 { -1 } else { 1 };
                    let weight: f64 = on
                        .iter()
                        .map(|&a| {
                            (0..3)
                                .filter(|&b| b != a)
                                .map(|b| dx * t(ijk[b]))
                                .product::<f64>()
                        })
                        .sum();
                    boundary_of[p] = boundary.len() as u32;
                    boundary.push(BoundaryNode {
                        node: p,
                        ijk,
                        axis,
                        sign,
                        weight,
                    });
                }
            }
        }
        Ok(Grid3 {
            n,
            dx,
            boundary,
            boundary_of,
            interior,
            interior_of,
            volume,
            gram: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Nodes per axis, `N + 1`.
    pub fn np(&self) -> usize {
        self.n + 1
    }

    pub fn node_count(&self) -> usize {
        self.np().pow(3)
    }

    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }

    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.np() + j) * self.np() + l
    }

    pub fn ijk(&self, p: usize) -> [usize; 3] {
        let np = self.np();
        [p / (np * np), (p / np) % np, p % np]
    }

    pub fn coords(&self, p: usize) -> [f64; 3] {
        let c = self.ijk(p);
        [
            c[0] as f64 * self.dx,
            c[1] as f64 * self.dx,
            c[2] as f64 * self.dx,
        ]
    }

    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => self.np() * self.np(),
            1 => self.np(),
            _ => 1,
        }
    }

    pub fn boundary(&self) -> &[BoundaryNode] {
        &self.boundary
    }

    pub fn boundary_index(&self, p: usize) -> Option<usize> {
        let b = self.boundary_of[p];
        (b != NONE).then_some(b as usize)
    }

    pub fn is_boundary(&self, p: usize) -> bool {
        self.boundary_of[p] != NONE
    }

    /// Interior nodes in lexicographic order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn interior_index(&self, p: usize) -> Option<usize> {
        let q = self.interior_of[p];
        (q != NONE).then_some(q as usize)
    }

    pub fn volume_weight(&self, p: usize) -> f64 {
        self.volume[p]
    }

    pub fn volume_weights(&self) -> &[f64] {
        &self.volume
    }

    /// Surface weights in boundary order.
    pub fn face_weights(&self) -> Vec<f64> {
        self.boundary.iter().map(|b| b.weight).collect()
    }

    fn t(&self, c: usize) -> f64 {
        if c == 0 || c == self.n {
            0.5
        } else {
            1.0
        }
    }

    /// Visits every grid edge `(p, p + e_axis)` with its transverse trapezoid factor.
    pub fn for_each_edge(&self, mut f: impl FnMut(usize, usize, f64)) {
        let n = self.n;
        let np = self.np();
        for i in 0..np {
            for j in 0..np {
                for l in 0..np {
                    let p = (i * np + j) * np + l;
                    let c = [i, j, l];
                    for axis in 0..3 {
                        if c[axis] == n {
                            continue;
                        }
                        let w: f64 = (0..3)
                            .filter(|&b| b != axis)
                            .map(|b| self.t(c[b]))
                            .product();
                        f(p, p + self.stride(axis), w);
                    }
                }
            }
        }
    }

    /// Interior neighbours of a boundary node (at most one off edges and corners).
    pub fn interior_neighbours(&self, p: usize) -> Vec<usize> {
        let c = self.ijk(p);
        let mut out = Vec::new();
        for axis in 0..3 {
            for d in [-1i64, 1] {
                let v = c[axis] as i64 + d;
                if v < 0 || v > self.n as i64 {
                    continue;
                }
                let mut q = c;
                q[axis] = v as usize;
                let qi = self.index(q[0], q[1], q[2]);
                if !self.is_boundary(qi) {
                    out.push(qi);
                }
            }
        }
        out
    }

    pub fn same_as(&self, other: &Grid3) -> bool {
        std::ptr::eq(self, other) || self.n == other.n
    }
}

pub(crate) fn check_same(a: &Grid3, b: &Grid3) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(LabError::GridMismatch(format!(
            "N={} vs N={}",
            a.n(),
            b.n()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        for n in [4, 5, 8] {
            let g = Grid3::new(n).unwrap();
            assert_eq!(g.interior_count(), (n - 1).pow(3));
            assert_eq!(g.boundary_count() + g.interior_count(), (n + 1).pow(3));
            assert_eq!(g.boundary_count(), 6 * (n - 1) * (n - 1) + 12 * (n - 1) + 8);
        }
        assert!(Grid3::new(3).is_err());
    }

    #[test]
    fn weights_sum() {
        let g = Grid3::new(7).unwrap();
        let v: f64 = g.volume_weights().iter().sum();
        assert!((v - 1.0).abs() < 1e-12);
        let s: f64 = g.face_weights().iter().sum();
        assert!((s - 6.0).abs() < 1e-10);
    }

    #[test]
    fn owner_face_is_lexicographic() {
        let g = Grid3::new(4).unwrap();
        let corner = g.boundary_index(g.index(4, 0, 4)).unwrap();
        let b = g.boundary()[corner];
        assert_eq!((b.axis, b.sign), (0, 1));
        let edge = g.boundary()[g.boundary_index(g.index(2, 0, 4)).unwrap()];
        assert_eq!((edge.axis, edge.sign), (1, -1));
    }

    #[test]
    fn edge_weights_integrate_linear_gradient() {
        // Σ c_e Δx (x1(p) - x1(q))² = ∫|∇x1|² = 1
        let g = Grid3::new(6).unwrap();
        let mut s = 0.0;
        g.for_each_edge(|p, q, c| {
            let d = g.coords(p)[0] - g.coords(q)[0];
            s += c * g.dx() * d * d;
        });
        assert!((s - 1.0).abs() < 1e-12);
    }
}
