//! Wave packets, spectral and finite-difference time evolution,
//! autocorrelation and quantum carpets.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::banded::BandLu;
use crate::eigensolve::{discretize, EigenPair, Stencil};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::SampledPotential;
use crate::spectra::rational_to_f64;
use crate::wavefunction::Wavefunction;

/// Residual norm above which an initial state counts as mostly unbound.
pub const UNBOUND_WARNING: f64 = 0.5;

/// Default number of time rows in a carpet.
pub const DEFAULT_CARPET_ROWS: usize = 512;

/// Normalized `exp(−(x−center)²/(4·width²) + i·momentum·x)`.
pub fn gaussian_packet(grid: &Grid, center: f64, momentum: f64, width: f64) -> Result<Wavefunction> {
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::invalid(format!("gaussian width must be positive, got {width}")));
    }
    let amps = grid
        .points()
        .into_iter()
        .map(|x| {
            let envelope = (-(x - center).powi(2) / (4.0 * width * width)).exp();
            Complex64::from_polar(envelope, momentum * x)
        })
        .collect();
    Wavefunction::new(*grid, amps)?.normalized()
}

/// One term of a Gaussian superposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    #[serde(default = "one")]
    pub amplitude: f64,
    pub center: f64,
    #[serde(default)]
    pub momentum: f64,
    pub width: f64,
}

fn one() -> f64 {
    1.0
}

/// Normalized `Σ amplitude_j · g_j` where each `g_j` is a normalized Gaussian.
pub fn gaussian_superposition(grid: &Grid, terms: &[GaussianSpec]) -> Result<Wavefunction> {
    if terms.is_empty() {
        return Err(Error::invalid("gaussian superposition needs at least one term"));
    }
    let mut psi = Wavefunction::zeros(*grid);
    for t in terms {
        let g = gaussian_packet(grid, t.center, t.momentum, t.width)?;
        psi.add_scaled(Complex64::new(t.amplitude, 0.0), &g)?;
    }
    psi.normalized()
}

/// Normalized raised cosine `(1 + cos(2π(x − mid)/(right − left)))/2` on
/// `[left, right]`, zero elsewhere.
pub fn cosine_packet(grid: &Grid, left: f64, right: f64) -> Result<Wavefunction> {
    if !(right > left) {
        return Err(Error::invalid(format!("empty cosine window [{left}, {right}]")));
    }
    let mid = 0.5 * (left + right);
    let span = right - left;
    let values = grid
        .points()
        .into_iter()
        .map(|x| {
            if x < left || x > right {
                0.0
            } else {
                0.5 * (1.0 + (2.0 * PI * (x - mid) / span).cos())
            }
        })
        .collect();
    Wavefunction::from_real(*grid, values)?.normalized()
}

/// Which energies drive the phases `e^{−iE_n t}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergySource {
    #[default]
    Computed,
    Designed,
}

/// Expansion of a state in a truncated bound eigenbasis.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pairs: Vec<(EigenPair, Complex64)>,
    energies: Vec<f64>,
    source: EnergySource,
    residual_norm: f64,
}

/// `c_n = ⟨ψ_n|ψ⟩`; the residual is the norm of what the basis misses.
pub fn decompose(psi: &Wavefunction, basis: &[EigenPair]) -> Result<SpectralDecomposition> {
    let mut pairs = Vec::with_capacity(basis.len());
    for pair in basis {
        let c = pair.state.inner(psi)?;
        pairs.push((pair.clone(), c));
    }
    let captured: f64 = pairs.iter().map(|(_, c)| c.norm_sqr()).sum();
    let residual_norm = (psi.norm_sqr() - captured).max(0.0).sqrt();
    let energies = basis.iter().map(|p| p.energy).collect();
    Ok(SpectralDecomposition { pairs, energies, source: EnergySource::Computed, residual_norm })
}

impl SpectralDecomposition {
    /// Builds a decomposition from explicit coefficients.
    pub fn from_parts(basis: Vec<EigenPair>, coefficients: Vec<Complex64>, residual_norm: f64) -> Result<Self> {
        if basis.len() != coefficients.len() {
            return Err(Error::invalid("basis and coefficient counts differ"));
        }
        if let Some(first) = basis.first() {
            if basis.iter().any(|p| p.state.grid() != first.state.grid()) {
                return Err(Error::GridMismatch);
            }
        }
        let energies = basis.iter().map(|p| p.energy).collect();
        let pairs = basis.into_iter().zip(coefficients).collect();
        Ok(Self { pairs, energies, source: EnergySource::Computed, residual_norm })
    }

    pub fn pairs(&self) -> &[(EigenPair, Complex64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|(_, c)| *c).collect()
    }

    /// Energies used for time evolution.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy_source(&self) -> EnergySource {
        self.source
    }

    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    /// `Σ|c_n|²`.
    pub fn bound_weight(&self) -> f64 {
        self.pairs.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    fn grid(&self) -> Result<Grid> {
        self.pairs
            .first()
            .map(|(p, _)| *p.state.grid())
            .ok_or_else(|| Error::invalid("empty spectral decomposition"))
    }

    /// Replaces the computed eigenvalues by exact designed ones, matched by index.
    pub fn with_designed_energies(mut self, levels: &[Rational64]) -> Result<Self> {
        if levels.len() < self.pairs.len() {
            return Err(Error::invalid(format!(
                "{} designed levels for a {}-state basis",
                levels.len(),
                self.pairs.len()
            )));
        }
        self.energies = levels[..self.pairs.len()].iter().map(|&l| rational_to_f64(l)).collect();
        self.source = EnergySource::Designed;
        Ok(self)
    }

    /// Keeps only the listed basis states (the sub-packet they carry).
    pub fn restricted(&self, indices: &[usize]) -> Result<Self> {
        let mut pairs = Vec::with_capacity(indices.len());
        let mut energies = Vec::with_capacity(indices.len());
        for &i in indices {
            let (p, c) = self
                .pairs
                .get(i)
                .ok_or_else(|| Error::invalid(format!("basis index {i} out of range")))?;
            pairs.push((p.clone(), *c));
            energies.push(self.energies[i]);
        }
        let dropped: f64 = self.bound_weight() - pairs.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>();
        let residual_norm = (self.residual_norm.powi(2) + dropped.max(0.0)).sqrt();
        Ok(Self { pairs, energies, source: self.source, residual_norm })
    }

    /// `Σ c_n e^{−iE_n t} ψ_n`.
    pub fn state_at(&self, t: f64) -> Result<Wavefunction> {
        let grid = self.grid()?;
        let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
        for ((pair, c), &e) in self.pairs.iter().zip(&self.energies) {
            let w = c * Complex64::from_polar(1.0, -e * t);
            for (o, a) in out.iter_mut().zip(pair.state.amplitudes()) {
                *o += w * a;
            }
        }
        Wavefunction::new(grid, out)
    }
}

/// `Σ c_n ψ_n`, renormalized.
pub fn project_to_bound(decomposition: &SpectralDecomposition) -> Result<Wavefunction> {
    if decomposition.residual_norm >= UNBOUND_WARNING {
        log::warn!(
            "initial state is mostly unbound: residual norm {:.3} outside the bound basis",
            decomposition.residual_norm
        );
    }
    decomposition.state_at(0.0)?.normalized()
}

pub fn propagate_spectral(decomposition: &SpectralDecomposition, t: f64) -> Result<Wavefunction> {
    decomposition.state_at(t)
}

/// `A(t) = Σ|c_n|² e^{−iE_n t} / Σ|c_n|²`: the overlap of the bound part
/// with its own evolution. Unbound residual weight is left out.
pub fn autocorrelation(decomposition: &SpectralDecomposition, times: &[f64]) -> Vec<Complex64> {
    let weights: Vec<f64> = decomposition.pairs.iter().map(|(_, c)| c.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    times
        .iter()
        .map(|&t| {
            let s: Complex64 = weights
                .iter()
                .zip(&decomposition.energies)
                .map(|(w, e)| Complex64::from_polar(*w, -e * t))
                .sum();
            if total > 0.0 {
                s / total
            } else {
                s
            }
        })
        .collect()
}

/// Rational approximation of the propagator `e^{−iHΔt}` per step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeScheme {
    /// Second-order Cayley form.
    CrankNicolson,
    /// Fourth-order (2,2) Padé, applied as two complex Cayley-like factors.
    #[default]
    Pade4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitaryOptions {
    pub stencil: Stencil,
    pub scheme: TimeScheme,
    /// Energy subtracted from `H` while stepping and restored as a global
    /// phase; `None` uses `⟨ψ|H|ψ⟩`.
    pub reference_energy: Option<f64>,
}

impl Default for UnitaryOptions {
    fn default() -> Self {
        Self { stencil: Stencil::FivePoint, scheme: TimeScheme::Pade4, reference_energy: None }
    }
}

/// Implicit finite-difference evolution of `psi` in `v` up to `t_final`.
pub fn propagate_unitary(
    psi: &Wavefunction,
    v: &SampledPotential,
    t_final: f64,
    n_steps: usize,
    opts: &UnitaryOptions,
) -> Result<Wavefunction> {
    if n_steps == 0 {
        return Err(Error::invalid("n_steps must be at least 1"));
    }
    if psi.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let h = discretize(v, opts.stencil);
    let grid = *v.grid();
    let n = grid.len();
    let bw = opts.stencil.bandwidth();
    let dt = t_final / n_steps as f64;
    let mut x: Vec<Complex64> = psi.amplitudes()[1..n - 1].to_vec();

    let e_ref = opts.reference_energy.unwrap_or_else(|| {
        let hx = h.apply(&x);
        let num: Complex64 = x.iter().zip(&hx).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = x.iter().map(|a| a.norm_sqr()).sum();
        if den > 0.0 {
            num.re / den
        } else {
            0.0
        }
    });

    // each factor maps x to (1 + z/r)/(1 − z/r) x with z = −iΔt(H − E_ref)
    let roots: Vec<Complex64> = match opts.scheme {
        TimeScheme::CrankNicolson => vec![Complex64::new(2.0, 0.0)],
        TimeScheme::Pade4 => {
            let s3 = 3f64.sqrt();
            vec![Complex64::new(3.0, s3), Complex64::new(3.0, -s3)]
        }
    };
    let factors: Vec<(Complex64, BandLu<Complex64>)> = roots
        .iter()
        .map(|&r| {
            // (1 − z/r) = I + (iΔt/r)(H − E_ref)
            let g = Complex64::new(0.0, dt) / r;
            let lu = BandLu::factor(h.dim(), bw, bw, |i, j| {
                let hij = h.entry(i, j) - if i == j { e_ref } else { 0.0 };
                g * hij + if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
            })?;
            Ok((g, lu))
        })
        .collect::<Result<_>>()?;

    for _ in 0..n_steps {
        for (g, lu) in &factors {
            let hx = h.apply(&x);
            for (xi, hxi) in x.iter_mut().zip(&hx) {
                // (1 + z/r) x = x − g (H − E_ref) x
                *xi = *xi - g * (hxi - *xi * e_ref);
            }
            lu.solve_in_place(&mut x);
        }
    }
    let phase = Complex64::from_polar(1.0, -e_ref * t_final);
    let mut amps = Vec::with_capacity(n);
    amps.push(Complex64::new(0.0, 0.0));
    amps.extend(x.into_iter().map(|a| a * phase));
    amps.push(Complex64::new(0.0, 0.0));
    Wavefunction::new(grid, amps)
}

/// `|ψ(x, t)|` on equally spaced times in `[0, t_max]`, with the autocorrelation.
#[derive(Clone, Debug)]
pub struct Carpet {
    pub grid: Grid,
    pub times: Vec<f64>,
    /// One row per time.
    pub magnitudes: Vec<Vec<f64>>,
    pub autocorrelation: Vec<Complex64>,
    /// Norm of the discarded unbound part of the initial state.
    pub residual_norm: f64,
}

pub fn quantum_carpet(decomposition: &SpectralDecomposition, t_max: f64, n_times: usize) -> Result<Carpet> {
    if n_times < 2 {
        return Err(Error::invalid("a carpet needs at least two time rows"));
    }
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::invalid(format!("t_max must be positive, got {t_max}")));
    }
    let grid = decomposition.grid()?;
    let times: Vec<f64> =
        (0..n_times).map(|j| t_max * j as f64 / (n_times - 1) as f64).collect();
    let magnitudes = times
        .par_iter()
        .map(|&t| decomposition.state_at(t).map(|psi| psi.magnitudes()))
        .collect::<Result<Vec<_>>>()?;
    let autocorrelation = autocorrelation(decomposition, &times);
    Ok(Carpet { grid, times, magnitudes, autocorrelation, residual_norm: decomposition.residual_norm })
}

impl Carpet {
    /// 16-bit binary PGM, one image row per time, pixel `round(65535·|ψ|/max|ψ|)`.
    pub fn to_pgm(&self) -> Vec<u8> {
        let width = self.grid.len();
        let height = self.times.len();
        let max = self
            .magnitudes
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |m, &v| m.max(v));
        let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
        out.reserve(2 * width * height);
        for row in &self.magnitudes {
            for &v in row {
                let p = if max > 0.0 { (65535.0 * v / max).round() as u16 } else { 0 };
                out.extend_from_slice(&p.to_be_bytes());
            }
        }
        out
    }

    /// `t,re,im,abs` per time row.
    pub fn autocorrelation_csv(&self) -> String {
        let mut out = String::from("t,re,im,abs\n");
        for (t, a) in self.times.iter().zip(&self.autocorrelation) {
            let _ = writeln!(out, "{t},{},{},{}", a.re, a.im, a.norm());
        }
        out
    }

    pub fn write(&self, pgm_path: &Path, csv_path: &Path) -> Result<()> {
        std::fs::write(pgm_path, self.to_pgm())?;
        std::fs::write(csv_path, self.autocorrelation_csv())?;
        Ok(())
    }
}
