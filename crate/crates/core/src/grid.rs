use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of grid nodes.
pub const DEFAULT_POINTS: usize = 4097;

/// Uniform mesh on `[−L, L]` with an odd node count so that `x = 0` is a node.
///
/// Node positions are computed as `(k − c)·dx` with `c` the center index, so
/// the mesh is exactly mirror symmetric in floating point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_width: f64,
    n_points: usize,
    dx: f64,
}

impl Grid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::invalid(format!("half width must be positive, got {half_width}")));
        }
        if n_points < 3 || n_points.is_multiple_of(2) {
            return Err(Error::invalid(format!("point count must be odd and ≥ 3, got {n_points}")));
        }
        let dx = 2.0 * half_width / (n_points - 1) as f64;
        Ok(Self { half_width, n_points, dx })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn center(&self) -> usize {
        (self.n_points - 1) / 2
    }

    pub fn x(&self, k: usize) -> f64 {
        (k as f64 - self.center() as f64) * self.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.x(k)).collect()
    }

    /// Trapezoid-rule weights.
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.n_points {
            0.5 * self.dx
        } else {
            self.dx
        }
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.n_points);
        f.iter().enumerate().map(|(k, v)| self.weight(k) * v).sum()
    }

    /// Every other node of this grid; requires `(n − 1)/2` to be even so the
    /// coarse grid keeps an odd count.
    pub fn coarsened(&self) -> Result<Self> {
        Self::new(self.half_width, (self.n_points - 1) / 2 + 1)
    }

    /// Grid with twice the resolution on the same interval.
    pub fn refined(&self) -> Self {
        Self::new(self.half_width, 2 * (self.n_points - 1) + 1).expect("refinement keeps validity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_is_a_node_and_symmetric() {
        let g = Grid::new(7.3, 1025).unwrap();
        assert_eq!(g.x(g.center()), 0.0);
        for k in 0..g.len() {
            assert_eq!(g.x(k), -g.x(g.len() - 1 - k));
        }
        assert!((g.x(0) + 7.3).abs() < 1e-12);
        assert!((g.dx() - 14.6 / 1024.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::new(1.0, 4096).is_err());
        assert!(Grid::new(1.0, 1).is_err());
        assert!(Grid::new(0.0, 11).is_err());
        assert!(Grid::new(f64::NAN, 11).is_err());
    }

    #[test]
    fn trapezoid_integrates_gaussian() {
        let g = Grid::new(10.0, 2001).unwrap();
        let f: Vec<f64> = g.points().iter().map(|x| (-x * x).exp()).collect();
        assert!((g.integrate(&f) - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn refine_and_coarsen() {
        let g = Grid::new(3.0, 9).unwrap();
        assert_eq!(g.refined().len(), 17);
        assert_eq!(g.refined().coarsened().unwrap(), g);
    }
}
