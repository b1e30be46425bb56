//! Banded LU factorization with partial pivoting, for real and complex scalars.

use num_complex::ComplexFloat;
use num_traits::Zero;

use crate::error::{Error, Result};

/// LU factors of an `n × n` matrix with `kl` sub- and `ku` super-diagonals.
///
/// Row `i` stores columns `i − kl ..= i + ku + kl`; the extra `kl` columns hold
/// fill-in from row interchanges.
#[derive(Clone, Debug)]
pub struct BandLu<T> {
    n: usize,
    kl: usize,
    width: usize,
    data: Vec<T>,
    pivots: Vec<usize>,
}

impl<T: ComplexFloat> BandLu<T> {
    /// Factors the matrix whose entries are given by `entry(i, j)` for
    /// `|i − j|` within the band.
    pub fn factor(n: usize, kl: usize, ku: usize, entry: impl Fn(usize, usize) -> T) -> Result<Self> {
        let width = 2 * kl + ku + 1;
        let mut lu = Self { n, kl, width, data: vec![T::zero(); n * width], pivots: vec![0; n] };
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                *lu.at_mut(i, j) = entry(i, j);
            }
        }
        lu.eliminate(ku)?;
        Ok(lu)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        let k = self.idx(i, j);
        &mut self.data[k]
    }

    fn eliminate(&mut self, ku: usize) -> Result<()> {
        let (n, kl) = (self.n, self.kl);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = self.at(k, k).abs();
            for r in k + 1..=last_row {
                let m = self.at(r, k).abs();
                if m > best {
                    best = m;
                    p = r;
                }
            }
            if best.is_zero() {
                return Err(Error::Singular(k));
            }
            self.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.at(k, k);
            for r in k + 1..=last_row {
                let m = self.at(r, k) / pivot;
                *self.at_mut(r, k) = m;
                if m.is_zero() {
                    continue;
                }
                for j in k + 1..=last_col {
                    let v = self.at(r, j) - m * self.at(k, j);
                    *self.at_mut(r, j) = v;
                }
            }
        }
        Ok(())
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        let (n, kl) = (self.n, self.kl);
        let ku_total = self.width - 1 - kl;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                b[r] = b[r] - self.at(r, k) * bk;
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + ku_total).min(n - 1) {
                s = s - self.at(i, j) * b[j];
            }
            b[i] = s / self.at(i, i);
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn dense_solve_check<T: ComplexFloat<Real = f64> + std::fmt::Debug>(
        n: usize,
        kl: usize,
        ku: usize,
        entry: impl Fn(usize, usize) -> T + Copy,
    ) {
        let lu = BandLu::factor(n, kl, ku, entry).unwrap();
        let x_true: Vec<T> = (0..n).map(|i| T::from((i as f64 * 0.37).sin() + 0.1).unwrap()).collect();
        let mut b = vec![T::zero(); n];
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                b[i] = b[i] + entry(i, j) * x_true[j];
            }
        }
        lu.solve_in_place(&mut b);
        for i in 0..n {
            assert!((b[i] - x_true[i]).abs() < 1e-10, "i={i}: {:?} vs {:?}", b[i], x_true[i]);
        }
    }

    #[test]
    fn solves_indefinite_pentadiagonal_needing_pivots() {
        // zero diagonal forces row interchanges
        dense_solve_check(40, 2, 2, |i, j| {
            if i == j {
                if i % 3 == 0 { 0.0 } else { 0.5 + i as f64 * 0.01 }
            } else {
                1.0 / (1.0 + (i + 2 * j) as f64 % 5.0)
            }
        });
    }

    #[test]
    fn solves_complex_tridiagonal() {
        dense_solve_check(50, 1, 1, |i, j| {
            if i == j {
                Complex64::new(2.0, 0.3 * i as f64)
            } else {
                Complex64::new(-1.0, 0.1)
            }
        });
    }

    #[test]
    fn reports_singular_matrix() {
        assert!(matches!(BandLu::<f64>::factor(3, 1, 1, |_, _| 0.0), Err(Error::Singular(0))));
    }
}
