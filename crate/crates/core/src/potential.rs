//! Sampled potentials and their off-grid evaluation.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::spectra::{format_rational, rational_to_f64};

/// Analytic starting potentials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasePotential {
    /// `x²/2 + offset`; levels `n + 1/2 + offset`.
    Harmonic {
        #[serde(default)]
        offset: f64,
    },
    /// `V ≡ value`; no bound states, continuum above `value`.
    Constant { value: f64 },
}

impl BasePotential {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            BasePotential::Harmonic { offset } => 0.5 * x * x + offset,
            BasePotential::Constant { value } => value,
        }
    }

    /// Ground-state energy, or the continuum threshold for a constant.
    pub fn ground(&self) -> f64 {
        match *self {
            BasePotential::Harmonic { offset } => 0.5 + offset,
            BasePotential::Constant { value } => value,
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            BasePotential::Harmonic { offset } => {
                if offset == 0.0 {
                    "harmonic x^2/2".to_string()
                } else {
                    format!("harmonic x^2/2 + {offset}")
                }
            }
            BasePotential::Constant { value } => format!("constant {value}"),
        }
    }
}

/// A continuous superpotential: one dense solution per side of `x = 0`.
pub trait Curve: Send + Sync + std::fmt::Debug {
    fn eval(&self, x: f64) -> f64;
}

#[derive(Clone, Debug)]
enum Root {
    Base(BasePotential),
    Tabulated(CubicSpline),
}

/// Off-grid evaluator for a potential: an analytic or tabulated root followed
/// by the chain of intertwining steps applied to it, so that
/// `V_i(x) = U_i(x)² − V_{i−1}(x) + 2E_i` can be evaluated at any `x`.
#[derive(Clone, Debug)]
pub struct Profile {
    root: Root,
    steps: Vec<(Arc<dyn Curve>, f64)>,
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = match &self.root {
            Root::Base(b) => b.eval(x),
            Root::Tabulated(s) => s.eval(x),
        };
        for (u, level) in &self.steps {
            let u = u.eval(x);
            v = u * u - v + 2.0 * level;
        }
        v
    }

    pub(crate) fn push(&self, u: Arc<dyn Curve>, level: f64) -> Self {
        let mut steps = self.steps.clone();
        steps.push((u, level));
        Self { root: self.root.clone(), steps }
    }
}

/// Potential values on a grid, plus the exact levels injected so far.
#[derive(Clone, Debug)]
pub struct SampledPotential {
    grid: Grid,
    values: Vec<f64>,
    injected: Vec<Rational64>,
    base_tag: String,
    base: Option<BasePotential>,
    profile: Profile,
}

impl SampledPotential {
    pub fn from_base(grid: Grid, base: BasePotential) -> Self {
        let values = grid.points().iter().map(|&x| base.eval(x)).collect();
        Self {
            grid,
            values,
            injected: Vec::new(),
            base_tag: base.tag(),
            base: Some(base),
            profile: Profile { root: Root::Base(base), steps: Vec::new() },
        }
    }

    /// Wraps raw samples; off-grid values come from a natural cubic spline.
    pub fn from_samples(
        grid: Grid,
        values: Vec<f64>,
        base_tag: impl Into<String>,
        injected: Vec<Rational64>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite potential at node {k}")));
        }
        if injected.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::invalid("injected levels must be strictly decreasing"));
        }
        let spline = CubicSpline::new(grid, &values);
        Ok(Self {
            grid,
            values,
            injected,
            base_tag: base_tag.into(),
            base: None,
            profile: Profile { root: Root::Tabulated(spline), steps: Vec::new() },
        })
    }

    pub(crate) fn with_step(
        &self,
        values: Vec<f64>,
        u: Arc<dyn Curve>,
        level: Rational64,
    ) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite potential at node {k}")));
        }
        let mut injected = self.injected.clone();
        injected.push(level);
        Ok(Self {
            grid: self.grid,
            values,
            injected,
            base_tag: self.base_tag.clone(),
            base: self.base,
            profile: self.profile.push(u, rational_to_f64(level)),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Injected levels, descending (most recent last).
    pub fn injected_levels(&self) -> &[Rational64] {
        &self.injected
    }

    pub fn base_tag(&self) -> &str {
        &self.base_tag
    }

    pub fn base(&self) -> Option<BasePotential> {
        self.base
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Evaluates the potential between nodes.
    pub fn eval(&self, x: f64) -> f64 {
        self.profile.eval(x)
    }

    /// The ground-state energy when known without an eigensolve: the last
    /// injected level, or the analytic base's ground (continuum threshold for
    /// a constant base).
    pub fn known_ground(&self) -> Option<GroundState> {
        if let Some(&e) = self.injected.last() {
            Some(GroundState::Exact(e))
        } else {
            self.base.map(|b| GroundState::Approximate(b.ground()))
        }
    }

    /// CSV with header `x,V`, one row per node, shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 48);
        out.push_str("x,V\n");
        for (k, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{}", self.grid.x(k), v);
        }
        out
    }

    pub fn metadata(&self) -> PotentialMeta {
        PotentialMeta {
            generated_by: crate::GENERATED_BY.to_string(),
            base_tag: self.base_tag.clone(),
            injected_levels: self.injected.iter().map(|&e| format_rational(e)).collect(),
            half_width: self.grid.half_width(),
            n_points: self.grid.len(),
            dx: self.grid.dx(),
        }
    }

    pub fn write(&self, csv_path: &Path, meta_path: &Path) -> Result<()> {
        std::fs::write(csv_path, self.to_csv())?;
        let meta = serde_json::to_string_pretty(&self.metadata())
            .map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(meta_path, meta + "\n")?;
        Ok(())
    }

    /// Reads the `x,V` CSV back; the grid is reconstructed from the first
    /// and last abscissae and checked for uniformity.
    pub fn parse_csv(text: &str, base_tag: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("x,V") => {}
            other => return Err(Error::Parse(format!("expected header `x,V`, found {other:?}"))),
        }
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (x, v) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("row {}: expected two columns", i + 1)))?;
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))
            };
            xs.push(parse(x)?);
            vs.push(parse(v)?);
        }
        if xs.len() < 3 {
            return Err(Error::Parse("potential needs at least 3 rows".into()));
        }
        let half_width = 0.5 * (xs[xs.len() - 1] - xs[0]);
        let grid = Grid::new(half_width, xs.len())?;
        for (k, &x) in xs.iter().enumerate() {
            if (x - grid.x(k)).abs() > 1e-9 * half_width.max(1.0) {
                return Err(Error::Parse(format!("row {}: abscissa {x} is not on a uniform grid", k + 1)));
            }
        }
        Self::from_samples(grid, vs, base_tag, Vec::new())
    }

    pub fn read(csv_path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(csv_path)?;
        Self::parse_csv(&text, &format!("file {}", csv_path.display()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroundState {
    Exact(Rational64),
    Approximate(f64),
}

/// Sidecar metadata written next to `potential.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialMeta {
    pub generated_by: String,
    pub base_tag: String,
    pub injected_levels: Vec<String>,
    pub half_width: f64,
    pub n_points: usize,
    pub dx: f64,
}

/// Natural cubic spline on a uniform grid.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    grid: Grid,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    pub fn new(grid: Grid, values: &[f64]) -> Self {
        let n = values.len();
        let h = grid.dx();
        // Thomas algorithm for M_{k-1} + 4 M_k + M_{k+1} = 6 δ²y_k / h², M_0 = M_{n-1} = 0
        let mut second = vec![0.0; n];
        if n > 2 {
            let m = n - 2;
            let mut c = vec![0.0; m];
            let mut d = vec![0.0; m];
            for i in 0..m {
                let k = i + 1;
                let rhs = 6.0 * (values[k + 1] - 2.0 * values[k] + values[k - 1]) / (h * h);
                let denom = if i == 0 { 4.0 } else { 4.0 - c[i - 1] };
                c[i] = 1.0 / denom;
                d[i] = if i == 0 { rhs / denom } else { (rhs - d[i - 1]) / denom };
            }
            second[m] = d[m - 1];
            for i in (0..m - 1).rev() {
                second[i + 1] = d[i] - c[i] * second[i + 2];
            }
        }
        Self { grid, values: values.to_vec(), second }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let h = self.grid.dx();
        let n = self.values.len();
        let pos = (x + self.grid.center() as f64 * h) / h;
        let k = (pos.floor().max(0.0) as usize).min(n - 2);
        let t = pos - k as f64;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.second[k], self.second[k + 1]);
        let a = 1.0 - t;
        a * y0 + t * y1 + h * h / 6.0 * ((a * a * a - a) * m0 + (t * t * t - t) * m1)
    }
}
