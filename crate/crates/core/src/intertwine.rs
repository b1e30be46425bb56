//! First-order intertwining: insert one new level below the ground state of a
//! potential, and iterate that over a descending list of levels.
//!
//! For a level `E` below the ground state of `V`, the superpotential `U`
//! solves the Riccati equation `U' + U² = 2(V − E)` with `U(0) = α`, and the
//! partner potential is `U² − V + 2E`, which has every level of `V` plus `E`.
//! `U` is integrated directly (outward from the origin in both directions);
//! the auxiliary solution it is the logarithmic derivative of grows far too
//! fast to be handled in floating point.

use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ode::{self, DenseCurve, Halt, Tolerances};
use crate::potential::{Curve, GroundState, SampledPotential};
use crate::spectra::{format_rational, rational_to_f64, RationalLevelSet};
use crate::wavefunction::Wavefunction;

/// Integrator settings for the Riccati solve.
#[derive(Clone, Copy, Debug)]
pub struct RiccatiOptions {
    pub rtol: f64,
    pub atol: f64,
    /// `|U|` above this is reported as a pole.
    pub blowup: f64,
    pub max_steps: usize,
}

impl Default for RiccatiOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, blowup: 1e6, max_steps: 2_000_000 }
    }
}

/// Dense solutions on both sides of the origin.
#[derive(Debug)]
pub struct TwoSidedCurve {
    forward: DenseCurve,
    backward: DenseCurve,
}

impl Curve for TwoSidedCurve {
    fn eval(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.forward.eval(x)
        } else {
            self.backward.eval(x)
        }
    }
}

/// `U(x)` sampled on the grid, with its continuous form.
#[derive(Clone, Debug)]
pub struct Superpotential {
    grid: Grid,
    values: Vec<f64>,
    level: Rational64,
    alpha: f64,
    curve: Arc<TwoSidedCurve>,
}

impl Superpotential {
    /// Builds a superpotential from samples only (used to apply the
    /// intertwiner to arbitrary `U`); the continuous form is a flat extension.
    pub fn from_samples(grid: Grid, values: Vec<f64>, level: Rational64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        let alpha = values[grid.center()];
        let flat = |x0: f64| DenseCurve::constant(x0, alpha);
        Ok(Self {
            grid,
            values,
            level,
            alpha,
            curve: Arc::new(TwoSidedCurve { forward: flat(0.0), backward: flat(0.0) }),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn level(&self) -> Rational64 {
        self.level
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.curve.eval(x)
    }

    /// Number of accepted integrator steps (both directions).
    pub fn steps(&self) -> usize {
        self.curve.forward.steps() + self.curve.backward.steps()
    }

    /// `max |U' + U² − 2(V − E)|` over interior nodes, `U'` by centered
    /// differences.
    pub fn riccati_residual(&self, v_prev: &SampledPotential) -> f64 {
        let e = rational_to_f64(self.level);
        let h = self.grid.dx();
        let u = &self.values;
        let v = v_prev.values();
        (1..u.len() - 1)
            .map(|k| {
                let du = (u[k + 1] - u[k - 1]) / (2.0 * h);
                (du + u[k] * u[k] - 2.0 * (v[k] - e)).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn check_level(v_prev: &SampledPotential, level: Rational64) -> Result<()> {
    let e = rational_to_f64(level);
    match v_prev.known_ground() {
        Some(GroundState::Exact(g)) if level == g => Err(Error::DegenerateLevel(format_rational(level))),
        Some(GroundState::Exact(g)) if level > g => Err(Error::LevelNotBelowGround {
            level: format_rational(level),
            ground: format_rational(g),
        }),
        Some(GroundState::Approximate(g)) if (e - g).abs() <= 1e-12 * g.abs().max(1.0) => {
            Err(Error::DegenerateLevel(format_rational(level)))
        }
        Some(GroundState::Approximate(g)) if e > g => Err(Error::LevelNotBelowGround {
            level: format_rational(level),
            ground: g.to_string(),
        }),
        _ => Ok(()),
    }
}

/// Solves `U' + U² = 2(V_prev − E)` with `U(0) = alpha` across the grid.
pub fn solve_riccati(
    v_prev: &SampledPotential,
    level: Rational64,
    alpha: f64,
    opts: &RiccatiOptions,
) -> Result<Superpotential> {
    if !alpha.is_finite() {
        return Err(Error::invalid("alpha must be finite"));
    }
    check_level(v_prev, level)?;
    let grid = *v_prev.grid();
    let e = rational_to_f64(level);
    let profile = v_prev.profile();
    let rhs = |x: f64, u: f64| 2.0 * (profile.eval(x) - e) - u * u;
    let tol = Tolerances {
        rtol: opts.rtol,
        atol: opts.atol,
        blowup: opts.blowup,
        max_steps: opts.max_steps,
        max_step: None,
    };
    let label = format_rational(level);
    let to_error = |halt: Halt| match halt {
        Halt::Blowup { x } => Error::PoleDetected { level: label.clone(), x },
        Halt::StepUnderflow { x } | Halt::MaxSteps { x } => {
            Error::ToleranceFailure { level: label.clone(), x }
        }
    };
    let forward = ode::integrate(rhs, 0.0, alpha, grid.x(grid.len() - 1), &tol).map_err(to_error)?;
    let backward = ode::integrate(rhs, 0.0, alpha, grid.x(0), &tol).map_err(to_error)?;
    let two_sided = TwoSidedCurve { forward, backward };
    let values: Vec<f64> = (0..grid.len()).map(|k| two_sided.eval(grid.x(k))).collect();
    Ok(Superpotential { grid, values, level, alpha, curve: Arc::new(two_sided) })
}

/// One intertwining step: `V_next = U² − V_prev + 2E` at every node.
pub fn intertwine_step(
    v_prev: &SampledPotential,
    level: Rational64,
    alpha: f64,
    opts: &RiccatiOptions,
) -> Result<SampledPotential> {
    let u = solve_riccati(v_prev, level, alpha, opts)?;
    next_potential(v_prev, &u)
}

/// Forms the partner potential from an already solved superpotential.
pub fn next_potential(v_prev: &SampledPotential, u: &Superpotential) -> Result<SampledPotential> {
    if u.grid() != v_prev.grid() {
        return Err(Error::GridMismatch);
    }
    let e = rational_to_f64(u.level);
    let values = u
        .values
        .iter()
        .zip(v_prev.values())
        .map(|(&uk, &vk)| uk * uk - vk + 2.0 * e)
        .collect();
    v_prev.with_step(values, u.curve.clone(), u.level)
}

/// Adds every level of `to_add` (strictly descending, all below the ground
/// state of `v0`) in turn.
pub fn design_potential(
    v0: &SampledPotential,
    to_add: &[Rational64],
    alpha: f64,
    opts: &RiccatiOptions,
) -> Result<SampledPotential> {
    if to_add.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::invalid("levels to add must be strictly descending"));
    }
    let mut current = v0.clone();
    for (index, &level) in to_add.iter().enumerate() {
        log::debug!("intertwining level {} ({}/{})", format_rational(level), index + 1, to_add.len());
        current = intertwine_step(&current, level, alpha, opts).map_err(|source| Error::DesignStep {
            index,
            level: format_rational(level),
            source: Box::new(source),
        })?;
    }
    Ok(current)
}

/// Designs from an ascending target list by adding it in reverse beneath a
/// base whose spectrum lies above every target.
pub fn design_bottom_up(
    target: &RationalLevelSet,
    base: &SampledPotential,
    alpha: f64,
    opts: &RiccatiOptions,
) -> Result<SampledPotential> {
    let descending: Vec<_> = target.levels().iter().rev().copied().collect();
    design_potential(base, &descending, alpha, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntertwinerSign {
    Plus,
    Minus,
}

/// `(±ψ' + Uψ)/√2`, with `ψ'` from fourth-order centered differences
/// (second order next to the boundary).
pub fn apply_intertwiner(
    u: &Superpotential,
    psi: &Wavefunction,
    sign: IntertwinerSign,
) -> Result<Wavefunction> {
    if u.grid() != psi.grid() {
        return Err(Error::GridMismatch);
    }
    let s = match sign {
        IntertwinerSign::Plus => 1.0,
        IntertwinerSign::Minus => -1.0,
    };
    let d = derivative(psi.amplitudes(), u.grid().dx());
    let amps = d
        .iter()
        .zip(psi.amplitudes())
        .zip(u.values())
        .map(|((&dk, &pk), &uk)| (s * dk + uk * pk) * std::f64::consts::FRAC_1_SQRT_2)
        .collect();
    Wavefunction::new(*u.grid(), amps)
}

pub(crate) fn derivative(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    if n < 3 {
        return d;
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    for k in 1..n - 1 {
        d[k] = if k >= 2 && k + 2 < n {
            (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]) / (12.0 * h)
        } else {
            (f[k + 1] - f[k - 1]) / (2.0 * h)
        };
    }
    d
}
