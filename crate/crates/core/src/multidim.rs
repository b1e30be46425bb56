//! Separable products of one-dimensional designs. Nothing here is ever
//! sampled on a multi-dimensional grid; spectra and autocorrelations factor
//! over the axes.

use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::evolve::{autocorrelation, SpectralDecomposition};
use crate::potential::SampledPotential;
use crate::spectra::{checked_rational_gcd, revival_params, RationalLevelSet, RevivalParams};

/// `V(x₁, …, x_n) = Σ_k V_k(x_k)` with a common revival spacing.
#[derive(Clone, Debug)]
pub struct SeparablePotential {
    components: Vec<(SampledPotential, RationalLevelSet)>,
    params: Vec<RevivalParams>,
    a: Rational64,
    b_total: Rational64,
}

/// Validates that the axes share a revival spacing `a = gcd(a_1, …, a_n)`.
pub fn combine(components: Vec<(SampledPotential, RationalLevelSet)>) -> Result<SeparablePotential> {
    if components.len() < 2 {
        return Err(Error::invalid(format!(
            "a separable potential needs at least two components, got {}",
            components.len()
        )));
    }
    let params: Vec<RevivalParams> = components.iter().map(|(_, set)| revival_params(set)).collect();
    let mut a = Rational64::zero();
    for (j, p) in params.iter().enumerate() {
        a = match checked_rational_gcd(a, p.a) {
            Some(g) => g,
            None => {
                // name the first pair whose spacings do not fit in one rational
                let i = (0..j).find(|&i| checked_rational_gcd(params[i].a, p.a).is_none()).unwrap_or(0);
                return Err(Error::Incommensurate(i, j));
            }
        };
    }
    let b_sum = params.iter().fold(Rational64::zero(), |s, p| s + p.b);
    let b_total = b_sum - a * (b_sum / a).floor();
    Ok(SeparablePotential { components, params, a, b_total })
}

impl SeparablePotential {
    pub fn components(&self) -> &[(SampledPotential, RationalLevelSet)] {
        &self.components
    }

    pub fn axis_params(&self) -> &[RevivalParams] {
        &self.params
    }

    pub fn dims(&self) -> usize {
        self.components.len()
    }

    /// Common spacing of every product level.
    pub fn a(&self) -> Rational64 {
        self.a
    }

    /// Offset of every product level, reduced into `[0, a)`.
    pub fn b_total(&self) -> Rational64 {
        self.b_total
    }

    pub fn t_rev(&self) -> f64 {
        2.0 * std::f64::consts::PI / crate::spectra::rational_to_f64(self.a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductLevel {
    pub indices: Vec<usize>,
    pub energy: Rational64,
}

/// All sums `E_{k₁} + … + E_{k_n}` over the first `counts[axis]` levels of
/// each axis, in lexicographic order of the multi-index.
pub fn product_levels(sep: &SeparablePotential, counts: &[usize]) -> Result<Vec<ProductLevel>> {
    if counts.len() != sep.dims() {
        return Err(Error::invalid(format!(
            "{} counts given for {} axes",
            counts.len(),
            sep.dims()
        )));
    }
    for (axis, (&c, (_, set))) in counts.iter().zip(&sep.components).enumerate() {
        if c == 0 || c > set.len() {
            return Err(Error::invalid(format!(
                "axis {axis}: count {c} outside 1..={}",
                set.len()
            )));
        }
    }
    let mut out = Vec::with_capacity(counts.iter().product());
    let mut idx = vec![0usize; counts.len()];
    loop {
        let energy = idx
            .iter()
            .zip(&sep.components)
            .fold(Rational64::zero(), |s, (&k, (_, set))| s + set.levels()[k]);
        out.push(ProductLevel { indices: idx.clone(), energy });
        // odometer, last axis fastest
        let mut axis = counts.len();
        loop {
            if axis == 0 {
                return Ok(out);
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < counts[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

/// `k1,k2,...,energy` with exact rational energies.
pub fn product_levels_csv(levels: &[ProductLevel]) -> String {
    let dims = levels.first().map_or(0, |l| l.indices.len());
    let mut out: Vec<String> = (1..=dims).map(|k| format!("k{k}")).collect();
    out.push("energy".into());
    let mut text = out.join(",") + "\n";
    for l in levels {
        for k in &l.indices {
            let _ = write!(text, "{k},");
        }
        let _ = writeln!(text, "{}", crate::spectra::format_rational(l.energy));
    }
    text
}

/// A product wavefunction `Π_k ψ_k(x_k)`, held as one expansion per axis.
#[derive(Clone, Debug)]
pub struct ProductState {
    factors: Vec<SpectralDecomposition>,
}

impl ProductState {
    pub fn new(factors: Vec<SpectralDecomposition>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("a product state needs at least one factor"));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[SpectralDecomposition] {
        &self.factors
    }
}

/// `A(t) = Π_k A_k(t)`.
pub fn product_autocorrelation(state: &ProductState, times: &[f64]) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(1.0, 0.0); times.len()];
    for f in &state.factors {
        for (a, ak) in acc.iter_mut().zip(autocorrelation(f, times)) {
            *a *= ak;
        }
    }
    acc
}
