//! Independent spectrum check: finite-difference Hamiltonian, Sturm-count
//! bisection for the lowest eigenvalues, inverse iteration for eigenstates.

use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::banded::BandLu;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::SampledPotential;
use crate::spectra::{rational_to_f64, RationalLevelSet};
use crate::wavefunction::Wavefunction;

/// Finite-difference approximation of `−½ d²/dx²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    /// Second order, tridiagonal.
    ThreePoint,
    /// Fourth order, pentadiagonal.
    #[default]
    FivePoint,
}

impl Stencil {
    pub fn bandwidth(self) -> usize {
        match self {
            Stencil::ThreePoint => 1,
            Stencil::FivePoint => 2,
        }
    }
}

/// `H = −½ d²/dx² + V` on the interior nodes, Dirichlet (`ψ = 0`) at `±L`.
///
/// Symmetric and banded with constant off-diagonals; tridiagonal for the
/// three-point stencil (diagonal `1/dx² + V`, off-diagonal `−1/(2dx²)`).
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    grid: Grid,
    stencil: Stencil,
    diagonal: Vec<f64>,
    off1: f64,
    off2: f64,
}

pub fn discretize(v: &SampledPotential, stencil: Stencil) -> Hamiltonian {
    Hamiltonian::new(*v.grid(), &v.values()[1..v.grid().len() - 1], stencil)
}

impl Hamiltonian {
    /// `interior_potential` holds `V` at nodes `1..n−1`.
    pub fn new(grid: Grid, interior_potential: &[f64], stencil: Stencil) -> Self {
        debug_assert_eq!(interior_potential.len(), grid.len() - 2);
        let inv = 1.0 / (grid.dx() * grid.dx());
        let (kin, off1, off2) = match stencil {
            Stencil::ThreePoint => (inv, -0.5 * inv, 0.0),
            Stencil::FivePoint => (1.25 * inv, -2.0 / 3.0 * inv, inv / 24.0),
        };
        let diagonal = interior_potential.iter().map(|v| kin + v).collect();
        Self { grid, stencil, diagonal, off1, off2 }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> f64 {
        self.off1
    }

    pub fn second_off_diagonal(&self) -> f64 {
        self.off2
    }

    /// Number of unknowns (interior nodes).
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Matrix entry `(i, j)` in the interior numbering.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diagonal[i],
            1 => self.off1,
            2 => self.off2,
            _ => 0.0,
        }
    }

    /// `H x` for interior vectors.
    pub fn apply<T>(&self, x: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let n = self.dim();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut s = x[i] * self.diagonal[i];
            if i >= 1 {
                s = s + x[i - 1] * self.off1;
            }
            if i + 1 < n {
                s = s + x[i + 1] * self.off1;
            }
            if self.off2 != 0.0 {
                if i >= 2 {
                    s = s + x[i - 2] * self.off2;
                }
                if i + 2 < n {
                    s = s + x[i + 2] * self.off2;
                }
            }
            out.push(s);
        }
        out
    }

    /// `H ψ` on the full grid (boundary nodes are taken as zero).
    pub fn apply_full(&self, psi: &Wavefunction) -> Result<Wavefunction> {
        if psi.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let n = self.grid.len();
        let inner = self.apply(&psi.amplitudes()[1..n - 1]);
        Wavefunction::new(self.grid, pad(inner))
    }

    fn scale(&self) -> f64 {
        let vmax = self.diagonal.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        vmax + 2.0 * (self.off1.abs() + self.off2.abs())
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let radius = 2.0 * (self.off1.abs() + self.off2.abs());
        let lo = self.diagonal.iter().fold(f64::INFINITY, |m, &d| m.min(d)) - radius;
        let hi = self.diagonal.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d)) + radius;
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `lambda` (Sylvester inertia of
    /// the `LDLᵀ` factorization of `H − λ`).
    pub fn count_below(&self, lambda: f64) -> usize {
        match self.stencil {
            Stencil::ThreePoint => self.count_below_tridiagonal(lambda),
            Stencil::FivePoint => {
                let nudge = self.scale() * f64::EPSILON;
                let mut shift = 0.0;
                for attempt in 1..=8 {
                    if let Some(c) = self.count_below_pentadiagonal(lambda + shift) {
                        return c;
                    }
                    // a vanishing pivot: move off it by a few ulps of the matrix scale
                    shift = nudge * 4f64.powi(attempt);
                }
                self.count_below_pentadiagonal(lambda + shift).unwrap_or(0)
            }
        }
    }

    fn count_below_tridiagonal(&self, lambda: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.off1.powi(2).max(1.0);
        let e2 = self.off1 * self.off1;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diagonal.iter().enumerate() {
            q = if i == 0 { d - lambda } else { d - lambda - e2 / q };
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn count_below_pentadiagonal(&self, lambda: f64) -> Option<usize> {
        let tiny = self.scale() * f64::EPSILON * 1e-3;
        let (e1, e2) = (self.off1, self.off2);
        let (mut l1, mut l2, mut m) = (0.0, 0.0, 0.0);
        let (mut dp, mut dpp) = (0.0, 0.0);
        let mut count = 0;
        for &a in &self.diagonal {
            let d = a - lambda - l1 * l1 * dp - l2 * l2 * dpp;
            if d.abs() < tiny || !d.is_finite() {
                return None;
            }
            if d < 0.0 {
                count += 1;
            }
            let next_l1 = (e1 - m * l1 * dp) / d;
            l2 = m;
            m = e2 / d;
            l1 = next_l1;
            dpp = dp;
            dp = d;
        }
        Some(count)
    }
}

fn pad(inner: Vec<Complex64>) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(inner.len() + 2);
    out.push(Complex64::new(0.0, 0.0));
    out.extend(inner);
    out.push(Complex64::new(0.0, 0.0));
    out
}

/// The `k` smallest eigenvalues, ascending.
pub fn lowest_eigenvalues(h: &Hamiltonian, k: usize) -> Result<Vec<f64>> {
    if k > h.dim() {
        return Err(Error::invalid(format!(
            "requested {k} eigenvalues from a {}-dimensional Hamiltonian",
            h.dim()
        )));
    }
    let (lo, hi) = h.spectral_bounds();
    let (lo, hi) = (lo - 1.0, hi + 1.0);
    (0..k).into_par_iter().map(|j| bisect(h, j, lo, hi)).collect()
}

fn bisect(h: &Hamiltonian, index: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) || mid == lo || mid == hi {
            return Ok(mid);
        }
        if h.count_below(mid) <= index {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence { index, lo, hi })
}

/// An eigenvalue with its normalized eigenstate.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub energy: f64,
    pub state: Wavefunction,
    /// `‖Hψ − Eψ‖` for the normalized state.
    pub residual: f64,
}

/// The `k` lowest eigenpairs. States are real, trapezoid-normalized, and
/// signed so that their first significant lobe (from the left) is positive.
pub fn eigenstates(h: &Hamiltonian, k: usize) -> Result<Vec<EigenPair>> {
    let energies = lowest_eigenvalues(h, k)?;
    for (i, w) in energies.windows(2).enumerate() {
        if w[1] - w[0] < 1e-10 {
            log::warn!("eigenvalues {i} and {} are nearly degenerate ({} vs {})", i + 1, w[0], w[1]);
        }
    }
    energies.par_iter().enumerate().map(|(j, &e)| inverse_iteration(h, j, e)).collect()
}

fn inverse_iteration(h: &Hamiltonian, index: usize, energy: f64) -> Result<EigenPair> {
    let n = h.dim();
    let bw = h.stencil.bandwidth();
    let scale = h.scale();
    let mut shift = energy;
    let lu = loop {
        match BandLu::factor(n, bw, bw, |i, j| h.entry(i, j) - if i == j { shift } else { 0.0 }) {
            Ok(lu) => break lu,
            Err(Error::Singular(_)) => shift += scale * f64::EPSILON * 16.0,
            Err(e) => return Err(e),
        }
    };
    // deterministic start vector without any parity
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            let t = (i as f64 * 0.618_033_988_749_895 + index as f64 * 0.414_213_562_373_095).fract();
            t - 0.3
        })
        .collect();
    let mut residual = f64::INFINITY;
    for _ in 0..6 {
        lu.solve_in_place(&mut v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let hv = h.apply(&v);
        residual = hv.iter().zip(&v).map(|(a, b)| (a - energy * b).powi(2)).sum::<f64>().sqrt();
        if residual <= 1e-9 {
            break;
        }
    }
    // sign convention: first component above 1e-3 of the maximum is positive
    let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * vmax) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let trapezoid_norm = (v.iter().map(|x| x * x).sum::<f64>() * h.grid.dx()).sqrt();
    let amps = v.iter().map(|x| Complex64::new(x / trapezoid_norm, 0.0)).collect();
    let state = Wavefunction::new(h.grid, pad(amps))?;
    Ok(EigenPair { energy, state, residual })
}

/// Count of interior sign changes, ignoring amplitudes below `1e-6·max` so
/// that round-off in the decaying tails does not register.
pub fn node_count(state: &Wavefunction) -> usize {
    let re: Vec<f64> = state.amplitudes().iter().map(|a| a.re).collect();
    let vmax = re.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &x in &re {
        if x.abs() < 1e-6 * vmax {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            nodes += 1;
        }
        last = x;
    }
    nodes
}

/// Share of an eigenstate's peak amplitude found near the Dirichlet walls;
/// large values mean the level is unbound or boundary-sensitive.
pub fn boundary_amplitude(state: &Wavefunction) -> f64 {
    let a = state.amplitudes();
    let n = a.len();
    let edge = (n / 50).max(3).min(n / 2);
    let vmax = a.iter().fold(0.0f64, |m, x| m.max(x.norm()));
    let edge_max =
        a[..edge].iter().chain(&a[n - edge..]).fold(0.0f64, |m, x| m.max(x.norm()));
    if vmax == 0.0 {
        0.0
    } else {
        edge_max / vmax
    }
}

/// Boundary amplitude above which a level is flagged.
pub const BOUNDARY_FLAG_THRESHOLD: f64 = 1e-4;

/// Default verification tolerance (energy units).
pub const DEFAULT_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationEntry {
    pub index: usize,
    pub target: Rational64,
    pub computed: f64,
    pub abs_error: f64,
    pub boundary_sensitive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub entries: Vec<VerificationEntry>,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl VerificationReport {
    pub fn computed(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.computed).collect()
    }

    /// `index,target,computed,abs_error` rows followed by a `#` summary line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,target,computed,abs_error\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                e.index,
                rational_to_f64(e.target),
                e.computed,
                e.abs_error
            );
        }
        let flagged: Vec<String> = self
            .entries
            .iter()
            .filter(|e| e.boundary_sensitive)
            .map(|e| e.index.to_string())
            .collect();
        let _ = writeln!(
            out,
            "# max_error={},tolerance={},pass={},boundary_sensitive=[{}]",
            self.max_error,
            self.tolerance,
            self.passed,
            flagged.join(" ")
        );
        out
    }
}

/// Compares the lowest `target.len()` eigenvalues of `v` with `target`.
pub fn verify_design(
    v: &SampledPotential,
    target: &RationalLevelSet,
    tolerance: f64,
    stencil: Stencil,
) -> Result<VerificationReport> {
    let h = discretize(v, stencil);
    let pairs = eigenstates(&h, target.len())?;
    let entries: Vec<_> = pairs
        .iter()
        .zip(target.levels())
        .enumerate()
        .map(|(index, (pair, &t))| VerificationEntry {
            index,
            target: t,
            computed: pair.energy,
            abs_error: (pair.energy - rational_to_f64(t)).abs(),
            boundary_sensitive: boundary_amplitude(&pair.state) > BOUNDARY_FLAG_THRESHOLD,
        })
        .collect();
    let max_error = entries.iter().map(|e| e.abs_error).fold(0.0, f64::max);
    Ok(VerificationReport { entries, max_error, tolerance, passed: max_error <= tolerance })
}
