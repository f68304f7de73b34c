use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::grid::{check_same, Grid3};
use crate::{LabError, Result};

/// Complex nodal samples over the whole grid.
///
/// Without a boundary extension the boundary entries are zero and treated as absent.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid3>,
    values: Vec<C64>,
    extended: bool,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid3>) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![C64::new(0.0, 0.0); grid.node_count()],
            extended: true,
        }
    }

    pub fn from_fn(grid: &Arc<Grid3>, mut f: impl FnMut([f64; 3]) -> C64) -> Self {
        let values = (0..grid.node_count()).map(|p| f(grid.coords(p))).collect();
        ScalarField {
            grid: grid.clone(),
            values,
            extended: true,
        }
    }

    pub fn from_real_fn(grid: &Arc<Grid3>, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    /// Full nodal vector; `extended = false` zeroes and hides the boundary.
    pub fn from_nodal(grid: &Arc<Grid3>, mut values: Vec<C64>, extended: bool) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(LabError::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if values
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LabError::Invalid("non-finite field entry".into()));
        }
        if !extended {
            for b in grid.boundary() {
                values[b.node] = C64::new(0.0, 0.0);
            }
        }
        Ok(ScalarField {
            grid: grid.clone(),
            values,
            extended,
        })
    }

    /// Interior samples in [`Grid3::interior`] order, zero boundary.
    pub fn from_interior(grid: &Arc<Grid3>, interior: &[C64]) -> Self {
        let mut values = vec![C64::new(0.0, 0.0); grid.node_count()];
        for (k, &p) in grid.interior().iter().enumerate() {
            values[p] = interior[k];
        }
        ScalarField {
            grid: grid.clone(),
            values,
            extended: false,
        }
    }

    pub fn grid(&self) -> &Arc<Grid3> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    /// Declares the boundary entries meaningful (zero trace is a valid extension).
    pub fn with_extension(mut self) -> Self {
        self.extended = true;
        self
    }

    /// Sample count: interior, plus boundary when extended.
    pub fn len(&self) -> usize {
        if self.extended {
            self.grid.node_count()
        } else {
            self.grid.interior_count()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn interior_values(&self) -> Vec<C64> {
        self.grid
            .interior()
            .iter()
            .map(|&p| self.values[p])
            .collect()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        let values = self.values.iter().map(|&z| f(z)).collect();
        ScalarField {
            grid: self.grid.clone(),
            values,
            extended: self.extended,
        }
    }

    pub fn scale(&self, a: C64) -> Self {
        self.map(|z| z * a)
    }

    pub fn zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        check_same(&self.grid, &other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ScalarField {
            grid: self.grid.clone(),
            values,
            extended: self.extended && other.extended,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Quadrature of `∫ self · other` (bilinear, no conjugation).
    pub fn integrate_product(&self, other: &Self) -> Result<C64> {
        check_same(&self.grid, &other.grid)?;
        let w = self.grid.volume_weights();
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(w)
            .map(|((&a, &b), &w)| a * b * w)
            .sum())
    }

    pub fn integrate(&self) -> C64 {
        let w = self.grid.volume_weights();
        self.values.iter().zip(w).map(|(&a, &w)| a * w).sum()
    }
}

/// Complex samples on the boundary nodes, in [`Grid3::boundary`] order.
#[derive(Debug, Clone)]
pub struct BoundaryField {
    grid: Arc<Grid3>,
    values: Vec<C64>,
}

impl BoundaryField {
    pub fn new(grid: &Arc<Grid3>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.boundary_count() {
            return Err(LabError::GridMismatch(format!(
                "{} values for {} boundary nodes",
                values.len(),
                grid.boundary_count()
            )));
        }
        if values
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LabError::Invalid("non-finite boundary entry".into()));
        }
        Ok(BoundaryField {
            grid: grid.clone(),
            values,
        })
    }

    pub fn zeros(grid: &Arc<Grid3>) -> Self {
        BoundaryField {
            grid: grid.clone(),
            values: vec![C64::new(0.0, 0.0); grid.boundary_count()],
        }
    }

    pub fn from_fn(grid: &Arc<Grid3>, mut f: impl FnMut([f64; 3]) -> C64) -> Self {
        let values = grid
            .boundary()
            .iter()
            .map(|b| f(grid.coords(b.node)))
            .collect();
        BoundaryField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid3> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        BoundaryField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, a: C64) -> Self {
        self.map(|z| z * a)
    }

    pub fn zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        check_same(&self.grid, &other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(BoundaryField {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    /// Bilinear surface pairing `∫_Γ f g dS`.
    pub fn pair(&self, other: &Self) -> C64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.grid.boundary())
            .map(|((&a, &b), n)| a * b * n.weight)
            .sum()
    }

    /// Sesquilinear surface pairing `∫_Γ f conj(g) dS`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.grid.boundary())
            .map(|((&a, &b), n)| a * b.conj() * n.weight)
            .sum()
    }

    pub fn l2(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Writes these values into the boundary entries of `u`.
    pub fn extend_into(&self, u: &mut ScalarField) -> Result<()> {
        check_same(&self.grid, u.grid())?;
        for (b, &z) in self.grid.boundary().iter().zip(&self.values) {
            u.values_mut()[b.node] = z;
        }
        u.extended = true;
        Ok(())
    }

    /// Canonical nodal extension: boundary values, zero inside.
    pub fn zero_extension(&self) -> ScalarField {
        let mut u = ScalarField::zeros(&self.grid);
        self.extend_into(&mut u).expect("same grid");
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_grid;

    #[test]
    fn lengths() {
        let g = build_grid(4).unwrap();
        let u = ScalarField::from_interior(&g, &vec![C64::new(1.0, 0.0); 27]);
        assert_eq!(u.len(), 27);
        assert_eq!(u.clone().with_extension().len(), 125);
        assert!(BoundaryField::new(&g, vec![C64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn rejects_nan() {
        let g = build_grid(4).unwrap();
        let mut v = vec![C64::new(0.0, 0.0); g.node_count()];
        v[3] = C64::new(f64::NAN, 0.0);
        assert!(ScalarField::from_nodal(&g, v, true).is_err());
    }

    #[test]
    fn unit_surface_pairing() {
        let g = build_grid(5).unwrap();
        let one = BoundaryField::from_fn(&g, |_| C64::new(1.0, 0.0));
        assert!((one.pair(&one).re - 6.0).abs() < 1e-12);
    }
}
