use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Complex amplitudes on a grid. Inner products and norms use the trapezoid rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Wavefunction {
    grid: Grid,
    amplitudes: Vec<Complex64>,
}

impl Wavefunction {
    pub fn new(grid: Grid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::invalid("wavefunction has non-finite amplitudes"));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn from_real(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, amplitudes: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Wavefunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .enumerate()
            .map(|(k, (a, b))| a.conj() * b * self.grid.weight(k))
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().enumerate().map(|(k, a)| a.norm_sqr() * self.grid.weight(k)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::invalid("cannot normalize a zero wavefunction"));
        }
        self.scale(Complex64::new(1.0 / n, 0.0));
        Ok(self)
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amplitudes.iter_mut().for_each(|a| *a *= factor);
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, factor: Complex64, other: &Wavefunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += factor * b;
        }
        Ok(())
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &Wavefunction) -> Result<f64> {
        let mut diff = self.clone();
        diff.add_scaled(Complex64::new(-1.0, 0.0), other)?;
        Ok(diff.norm())
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm()).collect()
    }

    /// `⟨x⟩` for a normalized state.
    pub fn mean_position(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| a.norm_sqr() * self.grid.x(k) * self.grid.weight(k))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_inner_product() {
        let grid = Grid::new(10.0, 2001).unwrap();
        let psi = Wavefunction::from_real(grid, grid.points().iter().map(|x| (-x * x).exp()).collect())
            .unwrap()
            .normalized()
            .unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-14);
        assert!((psi.inner(&psi).unwrap().re - 1.0).abs() < 1e-14);
        assert!(psi.mean_position().abs() < 1e-14);
        assert!(Wavefunction::zeros(grid).normalized().is_err());
        assert!(Wavefunction::from_real(grid, vec![0.0; 3]).is_err());
    }
}
