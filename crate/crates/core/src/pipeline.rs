//! Resolves a [`JobConfig`] into concrete inputs and runs the
//! design → verify → evolve → carpet chain.

use std::path::Path;

use num_rational::Rational64;
use serde::Serialize;

use crate::config::{Family, JobConfig, PacketConfig};
use crate::eigensolve::{discretize, eigenstates, verify_design, EigenPair, Stencil, VerificationReport};
use crate::error::{Error, Result};
use crate::evolve::{
    cosine_packet, decompose, gaussian_superposition, project_to_bound, propagate_spectral,
    propagate_unitary, quantum_carpet, Carpet, EnergySource, SpectralDecomposition, UnitaryOptions,
};
use crate::grid::{Grid, DEFAULT_POINTS};
use crate::intertwine::{design_potential, RiccatiOptions};
use crate::potential::{BasePotential, SampledPotential};
use crate::spectra::{
    alternating_gap_levels, biperiodic_levels, fibonacci_levels, fibonacci_number, format_rational,
    harmonic_levels, prime_levels, rational_to_f64, reverse_biperiodic_levels, revival_params,
    RationalLevelSet, RevivalParams,
};
use crate::wavefunction::Wavefunction;

/// The target set of a family together with its default base potential.
pub fn family_levels(family: &Family) -> Result<(RationalLevelSet, Option<BasePotential>)> {
    let harmonic = Some(BasePotential::Harmonic { offset: 0.0 });
    Ok(match family {
        Family::Harmonic { count } => (harmonic_levels(*count)?, harmonic),
        Family::Biperiodic { n_added, harmonic_count } => {
            (biperiodic_levels(*n_added, *harmonic_count)?, harmonic)
        }
        Family::ReverseBiperiodic { n_added, harmonic_count } => {
            (reverse_biperiodic_levels(*n_added, *harmonic_count)?, harmonic)
        }
        Family::Alternating { gap1, gap2, count, ground } => {
            let set = alternating_gap_levels(gap1.0, gap2.0, *count, ground.0)?;
            // the base ground continues the alternation one gap above the top
            let next_gap = if *count % 2 == 1 { gap1.0 } else { gap2.0 };
            let base_ground = set.highest() + next_gap;
            let offset = rational_to_f64(base_ground - Rational64::new(1, 2));
            (set, Some(BasePotential::Harmonic { offset }))
        }
        Family::Primes { count } => {
            let (set, next) = prime_levels(*count)?;
            (set, Some(BasePotential::Constant { value: rational_to_f64(next) }))
        }
        Family::Fibonacci { count } => {
            let set = fibonacci_levels(*count)?;
            let next = fibonacci_number(count + 2) as f64;
            (set, Some(BasePotential::Constant { value: next }))
        }
        Family::Custom { levels } => {
            let set = RationalLevelSet::from_unsorted(
                levels.iter().map(|e| e.0).collect(),
                crate::spectra::Origin::Custom,
            )?;
            (set, None)
        }
    })
}

/// Splits a target into the levels that must be added (descending) and
/// checks that the rest are exactly the lowest levels of the base.
pub fn plan_additions(target: &RationalLevelSet, base: &BasePotential) -> Result<Vec<Rational64>> {
    let ground = base.ground();
    let below: Vec<Rational64> =
        target.levels().iter().copied().filter(|&e| rational_to_f64(e) < ground).collect();
    let kept = &target.levels()[below.len()..];
    match *base {
        BasePotential::Constant { value } => {
            if let Some(&e) = kept.first() {
                return Err(Error::invalid(format!(
                    "level {} is not below the constant base {value}",
                    format_rational(e)
                )));
            }
        }
        BasePotential::Harmonic { offset } => {
            for (n, &e) in kept.iter().enumerate() {
                let expected = n as f64 + 0.5 + offset;
                if (rational_to_f64(e) - expected).abs() > 1e-12 * expected.abs().max(1.0) {
                    return Err(Error::invalid(format!(
                        "level {} is neither below the base ground {ground} nor the base level {expected}",
                        format_rational(e)
                    )));
                }
            }
        }
    }
    Ok(below.into_iter().rev().collect())
}

/// Half-width large enough that the highest target level decays well before
/// the Dirichlet walls.
///
/// Each intertwining step below a harmonic base lowers the far field by
/// about one unit, so the turning point of `E_top` moves out as levels are
/// added. Above a constant base the states decay like `exp(−κ|x|)` with
/// `κ = √(2(c − E_top))`; eighteen decay lengths leave `|ψ| ≈ 1e−8` at the wall.
pub fn default_half_width(target: &RationalLevelSet, base: &BasePotential, n_added: usize) -> f64 {
    let top = rational_to_f64(target.highest());
    let raw = match *base {
        BasePotential::Harmonic { offset } => {
            (2.0 * (top - offset + n_added as f64).max(1.0)).sqrt() + 4.0
        }
        BasePotential::Constant { value } => {
            let kappa = (2.0 * (value - top)).sqrt();
            (2.0 + 18.0 / kappa).max(4.0)
        }
    };
    (raw * 10.0).ceil() / 10.0
}

/// A configuration with every default filled in.
#[derive(Clone, Debug)]
pub struct Job {
    pub config: JobConfig,
    pub target: RationalLevelSet,
    pub base: BasePotential,
    pub to_add: Vec<Rational64>,
    pub grid: Grid,
    pub stencil: Stencil,
    pub revival: RevivalParams,
}

impl Job {
    pub fn from_config(config: &JobConfig) -> Result<Self> {
        let (target, default_base) = family_levels(&config.family)?;
        let base = config.base.or(default_base).ok_or_else(|| {
            Error::invalid("a custom level list needs an explicit [base] potential")
        })?;
        let to_add = plan_additions(&target, &base)?;
        let half_width = match config.grid.half_width {
            Some(l) => l,
            None => default_half_width(&target, &base, to_add.len()),
        };
        let grid = Grid::new(half_width, config.grid.n_points.unwrap_or(DEFAULT_POINTS))?;
        let stencil = config.grid.stencil.unwrap_or_default();
        if !(config.tolerance > 0.0) {
            return Err(Error::invalid(format!("tolerance must be positive, got {}", config.tolerance)));
        }
        let mut resolved = config.clone();
        resolved.base = Some(base);
        resolved.grid.half_width = Some(half_width);
        resolved.grid.n_points = Some(grid.len());
        resolved.grid.stencil = Some(stencil);
        if resolved.evolution.basis.is_none() {
            resolved.evolution.basis = Some(target.len());
        }
        let revival = revival_params(&target);
        Ok(Self { config: resolved, target, base, to_add, grid, stencil, revival })
    }

    pub fn base_potential(&self) -> SampledPotential {
        SampledPotential::from_base(self.grid, self.base)
    }

    pub fn design(&self) -> Result<SampledPotential> {
        design_potential(&self.base_potential(), &self.to_add, self.config.alpha, &RiccatiOptions::default())
    }

    pub fn verify(&self, v: &SampledPotential) -> Result<VerificationReport> {
        verify_design(v, &self.target, self.config.tolerance, self.stencil)
    }

    /// `levels.txt`: a comment naming the base, then one level per line.
    pub fn levels_text(&self) -> String {
        format!(
            "# base {}\n# origin {}\n{}",
            self.base.tag(),
            self.target.origin(),
            self.target.to_text()
        )
    }

    pub fn t_max(&self) -> f64 {
        self.config.evolution.t_max.resolve(self.revival.t_rev())
    }

    fn basis_size(&self) -> usize {
        self.config.evolution.basis.unwrap_or(self.target.len())
    }

    pub fn basis(&self, v: &SampledPotential) -> Result<Vec<EigenPair>> {
        eigenstates(&discretize(v, self.stencil), self.basis_size())
    }

    /// Builds the initial packet, projects it onto the bound basis, and
    /// expands the projected state.
    pub fn evolve(&self, v: &SampledPotential) -> Result<Evolution> {
        let basis = self.basis(v)?;
        let raw = match &self.config.evolution.packet {
            PacketConfig::Gaussians { terms } => gaussian_superposition(&self.grid, terms)?,
            PacketConfig::Cosine { left, right } => cosine_packet(&self.grid, *left, *right)?,
            PacketConfig::Eigenstate { index } => basis
                .get(*index)
                .ok_or_else(|| Error::invalid(format!("eigenstate index {index} beyond the basis")))?
                .state
                .clone(),
        };
        let raw_decomposition = decompose(&raw, &basis)?;
        let discarded = raw_decomposition.residual_norm();
        let initial = project_to_bound(&raw_decomposition)?;
        let mut decomposition = decompose(&initial, &basis)?;
        if self.config.evolution.energies == EnergySource::Designed {
            decomposition = decomposition.with_designed_energies(self.target.levels())?;
        }
        Ok(Evolution { initial, decomposition, discarded_residual: discarded })
    }
}

/// A bound-projected initial state and its expansion.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub initial: Wavefunction,
    pub decomposition: SpectralDecomposition,
    /// Norm of the unbound part removed from the raw packet.
    pub discarded_residual: f64,
}

impl Evolution {
    pub fn state_at(&self, t: f64) -> Result<Wavefunction> {
        propagate_spectral(&self.decomposition, t)
    }

    pub fn carpet(&self, t_max: f64, rows: usize) -> Result<Carpet> {
        let mut carpet = quantum_carpet(&self.decomposition, t_max, rows)?;
        carpet.residual_norm = self.discarded_residual;
        Ok(carpet)
    }

    pub fn unitary_state_at(&self, v: &SampledPotential, t: f64, steps: usize, opts: &UnitaryOptions) -> Result<Wavefunction> {
        propagate_unitary(&self.initial, v, t, steps, opts)
    }

    /// `index,energy,re,im,abs2`.
    pub fn coefficients_csv(&self) -> String {
        let mut out = String::from("index,energy,re,im,abs2\n");
        for (i, ((_, c), e)) in
            self.decomposition.pairs().iter().zip(self.decomposition.energies()).enumerate()
        {
            out.push_str(&format!("{i},{e},{},{},{}\n", c.re, c.im, c.norm_sqr()));
        }
        out
    }
}

/// `x,re,im,abs`.
pub fn wavefunction_csv(psi: &Wavefunction) -> String {
    let mut out = String::from("x,re,im,abs\n");
    for (k, a) in psi.amplitudes().iter().enumerate() {
        out.push_str(&format!("{},{},{},{}\n", psi.grid().x(k), a.re, a.im, a.norm()));
    }
    out
}

/// Sidecar JSON describing how an artifact was produced.
#[derive(Clone, Debug, Serialize)]
pub struct RunMeta<'a> {
    pub generated_by: &'static str,
    pub config: &'a JobConfig,
    pub revival_a: String,
    pub revival_b: String,
    pub t_rev: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<crate::potential::PotentialMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unitary_distance: Option<f64>,
}

impl<'a> RunMeta<'a> {
    pub fn new(job: &'a Job) -> Self {
        Self {
            generated_by: crate::GENERATED_BY,
            config: &job.config,
            revival_a: format_rational(job.revival.a),
            revival_b: format_rational(job.revival.b),
            t_rev: job.revival.t_rev(),
            potential: None,
            residual_norm: None,
            t_max: None,
            unitary_distance: None,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}
