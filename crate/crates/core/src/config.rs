//! TOML job description shared by every CLI subcommand.
//!
//! ```toml
//! alpha = 0.0
//! tolerance = 1e-4
//!
//! [family]
//! kind = "biperiodic"
//! n_added = 25
//! harmonic_count = 5
//!
//! [grid]
//! n_points = 4097
//!
//! [evolution]
//! t_max = "Nrev:1"
//! packet = { kind = "gaussians", terms = [{ center = 0.0, width = 0.4 }] }
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use num_rational::Rational64;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::eigensolve::{Stencil, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::evolve::{EnergySource, GaussianSpec, TimeScheme, DEFAULT_CARPET_ROWS};
use crate::potential::BasePotential;
use crate::spectra::{format_rational, parse_rational};

/// An exact rational written as `"p/q"` or a bare integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exact(pub Rational64);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(self.0))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Exact;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational such as \"3/2\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exact, E> {
                parse_rational(v).map(Exact).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exact, E> {
                Ok(Exact(Rational64::from_integer(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exact, E> {
                i64::try_from(v).map(|v| Exact(Rational64::from_integer(v))).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// Which target spectrum to build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Harmonic {
        count: usize,
    },
    Biperiodic {
        n_added: usize,
        #[serde(default = "default_harmonic_count")]
        harmonic_count: usize,
    },
    ReverseBiperiodic {
        n_added: usize,
        #[serde(default = "default_harmonic_count")]
        harmonic_count: usize,
    },
    Alternating {
        gap1: Exact,
        gap2: Exact,
        count: usize,
        #[serde(default = "zero")]
        ground: Exact,
    },
    Primes {
        count: usize,
    },
    Fibonacci {
        count: usize,
    },
    Custom {
        levels: Vec<Exact>,
    },
}

fn default_harmonic_count() -> usize {
    crate::spectra::DEFAULT_HARMONIC_COUNT
}

fn zero() -> Exact {
    Exact(Rational64::from_integer(0))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stencil: Option<Stencil>,
}

/// Initial wave packet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PacketConfig {
    Gaussians { terms: Vec<GaussianSpec> },
    Cosine { left: f64, right: f64 },
    /// A single eigenstate of the designed potential (stationary carpet).
    Eigenstate { index: usize },
}

/// An absolute time, or a multiple of the revival time written `"Nrev:x"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeSpec {
    Absolute(f64),
    Revivals(f64),
}

impl TimeSpec {
    pub fn resolve(self, t_rev: f64) -> f64 {
        match self {
            TimeSpec::Absolute(t) => t,
            TimeSpec::Revivals(k) => k * t_rev,
        }
    }
}

impl std::str::FromStr for TimeSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |v: &str| {
            v.trim().parse::<f64>().map_err(|e| Error::Parse(format!("time `{s}`: {e}")))
        };
        let spec = match s.strip_prefix("Nrev:") {
            Some(k) => TimeSpec::Revivals(parse(k)?),
            None => TimeSpec::Absolute(parse(s)?),
        };
        let value = match spec {
            TimeSpec::Absolute(v) | TimeSpec::Revivals(v) => v,
        };
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::Parse(format!("time `{s}` must be positive")));
        }
        Ok(spec)
    }
}

impl fmt::Display for TimeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeSpec::Absolute(t) => write!(f, "{t}"),
            TimeSpec::Revivals(k) => write!(f, "Nrev:{k}"),
        }
    }
}

impl Serialize for TimeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TimeSpec::Absolute(t) => s.serialize_f64(*t),
            TimeSpec::Revivals(_) => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for TimeSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = TimeSpec;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive time or \"Nrev:<multiple>\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<TimeSpec, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<TimeSpec, E> {
                v.to_string().parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<TimeSpec, E> {
                self.visit_f64(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<TimeSpec, E> {
                self.visit_f64(v as f64)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    #[serde(default = "default_packet")]
    pub packet: PacketConfig,
    #[serde(default)]
    pub energies: EnergySource,
    #[serde(default = "one_revival")]
    pub t_max: TimeSpec,
    #[serde(default = "default_rows")]
    pub rows: usize,
    /// Eigenstates kept in the expansion; defaults to the number of target levels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<usize>,
    /// Steps for the finite-difference cross-check propagator (0 disables it).
    #[serde(default)]
    pub unitary_steps: usize,
    #[serde(default)]
    pub scheme: TimeScheme,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            packet: default_packet(),
            energies: EnergySource::Computed,
            t_max: one_revival(),
            rows: DEFAULT_CARPET_ROWS,
            basis: None,
            unitary_steps: 0,
            scheme: TimeScheme::Pade4,
        }
    }
}

/// Two Gaussians: a narrow one at the centre, where deep added levels live,
/// and one far out, where the higher levels have their turning points.
pub fn default_packet() -> PacketConfig {
    PacketConfig::Gaussians {
        terms: vec![
            GaussianSpec { amplitude: 1.0, center: 0.0, momentum: 0.0, width: 0.4 },
            GaussianSpec { amplitude: 1.0, center: 6.5, momentum: 0.0, width: 0.5 },
        ],
    }
}

fn one_revival() -> TimeSpec {
    TimeSpec::Revivals(1.0)
}

fn default_rows() -> usize {
    DEFAULT_CARPET_ROWS
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub family: Family,
    /// Defaults per family: harmonic below the target for the harmonic-type
    /// families, the next prime or Fibonacci number as a constant otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BasePotential>,
    #[serde(default)]
    pub grid: GridConfig,
    /// Initial value `U(0)` for every Riccati solve.
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl JobConfig {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            base: None,
            grid: GridConfig::default(),
            alpha: 0.0,
            tolerance: DEFAULT_TOLERANCE,
            evolution: EvolutionConfig::default(),
            output: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = JobConfig::parse("[family]\nkind = \"primes\"\ncount = 15\n").unwrap();
        assert_eq!(cfg.family, Family::Primes { count: 15 });
        assert_eq!(cfg.tolerance, DEFAULT_TOLERANCE);
        assert_eq!(cfg.evolution.rows, 512);
        assert_eq!(cfg.evolution.t_max, TimeSpec::Revivals(1.0));
        assert!(cfg.base.is_none());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(JobConfig::parse("[family]\nkind = \"primes\"\ncount = 15\ncuont = 3\n").is_err());
        assert!(JobConfig::parse("tolerence = 1e-3\n[family]\nkind = \"primes\"\ncount = 15\n").is_err());
        assert!(JobConfig::parse(
            "[family]\nkind = \"primes\"\ncount = 15\n[grid]\npoints = 4097\n"
        )
        .is_err());
    }

    #[test]
    fn round_trip() {
        let text = r#"
alpha = 0.25
tolerance = 1e-3
output = "runs/alt"

[family]
kind = "alternating"
gap1 = "1/2"
gap2 = "3/2"
count = 8
ground = -4

[base]
kind = "harmonic"
offset = 2.5

[grid]
half_width = 11.5
n_points = 2049
stencil = "three_point"

[evolution]
energies = "designed"
t_max = "Nrev:2.5"
rows = 64
basis = 8
packet = { kind = "gaussians", terms = [{ amplitude = 1.0, center = -1.0, width = 0.3, momentum = 2.0 }] }
"#;
        let cfg = JobConfig::parse(text).unwrap();
        assert_eq!(cfg.evolution.t_max, TimeSpec::Revivals(2.5));
        match &cfg.family {
            Family::Alternating { gap1, ground, .. } => {
                assert_eq!(gap1.0, Rational64::new(1, 2));
                assert_eq!(ground.0, Rational64::from_integer(-4));
            }
            other => panic!("{other:?}"),
        }
        let again = JobConfig::parse(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);

        let mut custom = JobConfig::new(Family::Custom {
            levels: vec![Exact(Rational64::new(-7, 3)), Exact(Rational64::from_integer(1))],
        });
        custom.base = Some(BasePotential::Constant { value: 3.0 });
        custom.evolution.t_max = TimeSpec::Absolute(12.5);
        custom.evolution.packet = PacketConfig::Cosine { left: -2.0, right: 2.0 };
        assert_eq!(JobConfig::parse(&custom.to_toml().unwrap()).unwrap(), custom);
    }

    fn any_family() -> impl Strategy<Value = Family> {
        let exact = (-50i64..50, 1i64..7).prop_map(|(p, q)| Exact(Rational64::new(p, q)));
        prop_oneof![
            (1usize..40).prop_map(|count| Family::Harmonic { count }),
            (1usize..40, 1usize..12).prop_map(|(n_added, harmonic_count)| Family::Biperiodic { n_added, harmonic_count }),
            (1usize..40, 1usize..12)
                .prop_map(|(n_added, harmonic_count)| Family::ReverseBiperiodic { n_added, harmonic_count }),
            (exact.clone(), exact.clone(), 1usize..20, exact.clone())
                .prop_map(|(gap1, gap2, count, ground)| Family::Alternating { gap1, gap2, count, ground }),
            (1usize..60).prop_map(|count| Family::Primes { count }),
            (1usize..30).prop_map(|count| Family::Fibonacci { count }),
            proptest::collection::vec(exact, 1..6).prop_map(|levels| Family::Custom { levels }),
        ]
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(
            family in any_family(),
            alpha in -1.0f64..1.0,
            tolerance in 1e-9f64..1e-2,
            n_points in proptest::option::of((2usize..5000).prop_map(|n| 2 * n + 1)),
            half_width in proptest::option::of(1.0f64..30.0),
            revivals in 0.0f64..4.0,
            rows in 2usize..1024,
        ) {
            let mut cfg = JobConfig::new(family);
            cfg.alpha = alpha;
            cfg.tolerance = tolerance;
            cfg.grid.n_points = n_points;
            cfg.grid.half_width = half_width;
            cfg.evolution.t_max = TimeSpec::Revivals(revivals);
            cfg.evolution.rows = rows;
            let again = JobConfig::parse(&cfg.to_toml().unwrap()).unwrap();
            prop_assert_eq!(cfg, again);
        }
    }

    #[test]
    fn time_spec_parsing() {
        assert_eq!("Nrev:1".parse::<TimeSpec>().unwrap(), TimeSpec::Revivals(1.0));
        assert_eq!("6.5".parse::<TimeSpec>().unwrap(), TimeSpec::Absolute(6.5));
        assert!("Nrev:-1".parse::<TimeSpec>().is_err());
        assert!("soon".parse::<TimeSpec>().is_err());
        assert!((TimeSpec::Revivals(0.5).resolve(4.0) - 2.0).abs() < 1e-15);
    }
}
