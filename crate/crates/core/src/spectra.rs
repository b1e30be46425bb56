//! Target level sets and the exact revival condition.
//!
//! Levels are exact rationals throughout. A discrete spectrum produces perfect
//! revivals when every level can be written as `E_n = a·N_n + b` with integer
//! `N_n`; the revival time is then `2π/a`. Floating point only enters once a
//! potential is sampled on a grid.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact energy level (units with ħ = m = 1).
///
/// `Ratio` keeps the representation reduced with a positive denominator.
pub type RationalLevel = Rational64;

/// Number of harmonic levels kept above the junction by the biperiodic generators.
pub const DEFAULT_HARMONIC_COUNT: usize = 10;

/// Which generator produced a level set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Harmonic { count: usize },
    Biperiodic { n_added: usize, harmonic_count: usize },
    ReverseBiperiodic { n_added: usize, harmonic_count: usize },
    AlternatingGap { gap1: Rational64, gap2: Rational64, count: usize, ground: Rational64 },
    Primes { count: usize },
    Fibonacci { count: usize },
    Custom,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Harmonic { count } => write!(f, "harmonic(count={count})"),
            Origin::Biperiodic { n_added, harmonic_count } => {
                write!(f, "biperiodic(n_added={n_added}, harmonic_count={harmonic_count})")
            }
            Origin::ReverseBiperiodic { n_added, harmonic_count } => write!(
                f,
                "reverse_biperiodic(n_added={n_added}, harmonic_count={harmonic_count})"
            ),
            Origin::AlternatingGap { gap1, gap2, count, ground } => write!(
                f,
                "alternating(gap1={gap1}, gap2={gap2}, count={count}, ground={ground})"
            ),
            Origin::Primes { count } => write!(f, "primes(count={count})"),
            Origin::Fibonacci { count } => write!(f, "fibonacci(count={count})"),
            Origin::Custom => write!(f, "custom"),
        }
    }
}

/// A nonempty, strictly increasing list of exact levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalLevelSet {
    levels: Vec<RationalLevel>,
    origin: Origin,
}

impl RationalLevelSet {
    pub fn new(levels: Vec<RationalLevel>, origin: Origin) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::invalid("level set must be nonempty"));
        }
        if let Some(w) = levels.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "levels must be strictly increasing ({} followed by {})",
                w[0], w[1]
            )));
        }
        Ok(Self { levels, origin })
    }

    /// Sorts and deduplicates an arbitrary list.
    pub fn from_unsorted(mut levels: Vec<RationalLevel>, origin: Origin) -> Result<Self> {
        levels.sort();
        levels.dedup();
        Self::new(levels, origin)
    }

    pub fn levels(&self) -> &[RationalLevel] {
        &self.levels
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn lowest(&self) -> RationalLevel {
        self.levels[0]
    }

    pub fn highest(&self) -> RationalLevel {
        *self.levels.last().expect("nonempty")
    }

    /// Levels strictly below `threshold`, in descending order (the order the
    /// intertwining loop consumes them).
    pub fn descending_below(&self, threshold: RationalLevel) -> Vec<RationalLevel> {
        self.levels.iter().rev().copied().filter(|&e| e < threshold).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.levels.iter().map(|&e| rational_to_f64(e)).collect()
    }

    /// One `numerator/denominator` token per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for level in &self.levels {
            out.push_str(&format_rational(*level));
            out.push('\n');
        }
        out
    }

    /// Parses the plain-text list format. Blank lines and lines starting
    /// with `#` are ignored. Tokens without a slash are read as integers.
    pub fn parse_text(text: &str) -> Result<Self> {
        let levels = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?;
        Self::new(levels, Origin::Custom)
    }
}

pub fn rational_to_f64(r: Rational64) -> f64 {
    r.to_f64().expect("i64 ratio always converts")
}

pub fn format_rational(r: Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(token: &str) -> Result<Rational64> {
    let token = token.trim();
    let parsed = match token.split_once('/') {
        Some((n, d)) => {
            let n = i64::from_str(n.trim()).map_err(|e| Error::Parse(format!("{token}: {e}")))?;
            let d = i64::from_str(d.trim()).map_err(|e| Error::Parse(format!("{token}: {e}")))?;
            if d == 0 {
                return Err(Error::Parse(format!("{token}: zero denominator")));
            }
            Rational64::new(n, d)
        }
        None => Rational64::from_integer(
            i64::from_str(token).map_err(|e| Error::Parse(format!("{token}: {e}")))?,
        ),
    };
    Ok(parsed)
}

/// `{1/2, 3/2, …, count − 1/2}`.
pub fn harmonic_levels(count: usize) -> Result<RationalLevelSet> {
    if count == 0 {
        return Err(Error::invalid("harmonic count must be at least 1"));
    }
    let levels = (0..count as i64).map(|n| Rational64::new(2 * n + 1, 2)).collect();
    RationalLevelSet::new(levels, Origin::Harmonic { count })
}

/// Added levels `−1, −3, …, −(2·n_added − 1)` below `harmonic_count`
/// harmonic levels.
pub fn biperiodic_levels(n_added: usize, harmonic_count: usize) -> Result<RationalLevelSet> {
    if n_added == 0 || harmonic_count == 0 {
        return Err(Error::invalid("biperiodic family needs n_added ≥ 1 and harmonic_count ≥ 1"));
    }
    let mut levels: Vec<_> =
        (0..n_added as i64).rev().map(|j| Rational64::from_integer(-(2 * j + 1))).collect();
    levels.extend_from_slice(harmonic_levels(harmonic_count)?.levels());
    RationalLevelSet::new(levels, Origin::Biperiodic { n_added, harmonic_count })
}

/// Added levels `0, −1/2, …, −(n_added − 1)/2` below `harmonic_count`
/// harmonic levels.
pub fn reverse_biperiodic_levels(n_added: usize, harmonic_count: usize) -> Result<RationalLevelSet> {
    if n_added == 0 || harmonic_count == 0 {
        return Err(Error::invalid(
            "reverse biperiodic family needs n_added ≥ 1 and harmonic_count ≥ 1",
        ));
    }
    let mut levels: Vec<_> = (0..n_added as i64).rev().map(|j| Rational64::new(-j, 2)).collect();
    levels.extend_from_slice(harmonic_levels(harmonic_count)?.levels());
    RationalLevelSet::new(levels, Origin::ReverseBiperiodic { n_added, harmonic_count })
}

/// `count` levels starting at `ground` whose successive gaps alternate
/// `gap1, gap2, gap1, …`.
pub fn alternating_gap_levels(
    gap1: Rational64,
    gap2: Rational64,
    count: usize,
    ground: Rational64,
) -> Result<RationalLevelSet> {
    if !gap1.is_positive() || !gap2.is_positive() {
        return Err(Error::invalid("alternating gaps must be positive"));
    }
    if count == 0 {
        return Err(Error::invalid("alternating family needs count ≥ 1"));
    }
    let mut levels = Vec::with_capacity(count);
    let mut e = ground;
    for i in 0..count {
        levels.push(e);
        e += if i % 2 == 0 { gap1 } else { gap2 };
    }
    RationalLevelSet::new(levels, Origin::AlternatingGap { gap1, gap2, count, ground })
}

/// First `n` primes.
pub fn primes(n: usize) -> Vec<i64> {
    let mut found: Vec<i64> = Vec::with_capacity(n);
    let mut candidate = 2i64;
    while found.len() < n {
        if found.iter().take_while(|&&p| p * p <= candidate).all(|&p| candidate % p != 0) {
            found.push(candidate);
        }
        candidate += 1;
    }
    found
}

/// The first `count` primes as levels, together with the constant base
/// potential `p_{count+1}` they are designed beneath.
pub fn prime_levels(count: usize) -> Result<(RationalLevelSet, Rational64)> {
    if count == 0 {
        return Err(Error::invalid("prime family needs count ≥ 1"));
    }
    let ps = primes(count + 1);
    let levels = ps[..count].iter().map(|&p| Rational64::from_integer(p)).collect();
    let set = RationalLevelSet::new(levels, Origin::Primes { count })?;
    Ok((set, Rational64::from_integer(ps[count])))
}

/// `F_n` with `F_1 = F_2 = 1`.
pub fn fibonacci_number(n: usize) -> i64 {
    let (mut a, mut b) = (0i64, 1i64);
    for _ in 0..n {
        let next = a + b;
        a = b;
        b = next;
    }
    a
}

/// `{F_2, …, F_{count+1}} = {1, 2, 3, 5, …}`; `F_1` is dropped so no value repeats.
pub fn fibonacci_levels(count: usize) -> Result<RationalLevelSet> {
    if count == 0 {
        return Err(Error::invalid("fibonacci family needs count ≥ 1"));
    }
    let levels = (2..=count + 1).map(|n| Rational64::from_integer(fibonacci_number(n))).collect();
    RationalLevelSet::new(levels, Origin::Fibonacci { count })
}

/// `E_n = a·N_n + b` decomposition of a level set, with `a` maximal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevivalParams {
    pub a: Rational64,
    pub b: Rational64,
    pub indices: Vec<i64>,
}

impl RevivalParams {
    /// Revival time divided by 2π, i.e. `1/a`, exactly.
    pub fn t_rev_over_two_pi(&self) -> Rational64 {
        self.a.recip()
    }

    pub fn t_rev(&self) -> f64 {
        2.0 * std::f64::consts::PI / rational_to_f64(self.a)
    }

    /// Global phase `exp(−2πi·b/a)` acquired at one revival.
    pub fn revival_phase(&self) -> num_complex::Complex64 {
        let turns = self.b / self.a;
        // reduce to [0, 1) before going to floating point
        let frac = turns - turns.floor();
        num_complex::Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * rational_to_f64(frac))
    }
}

/// Greatest common divisor of two rationals: the largest `g` such that both
/// are integer multiples of it.
pub fn rational_gcd(x: Rational64, y: Rational64) -> Rational64 {
    checked_rational_gcd(x, y).expect("rational gcd overflowed i64")
}

pub(crate) fn checked_rational_gcd(x: Rational64, y: Rational64) -> Option<Rational64> {
    if x.is_zero() {
        return Some(y.abs());
    }
    if y.is_zero() {
        return Some(x.abs());
    }
    let num = x.numer().gcd(y.numer());
    let (dx, dy) = (*x.denom(), *y.denom());
    let den = (dx / dx.gcd(&dy)).checked_mul(dy)?;
    Some(Rational64::new(num, den))
}

/// Exact revival parameters. `b` is reduced into `[0, a)`; a single level
/// uses the convention `a = 1`, `N = 0`.
pub fn revival_params(set: &RationalLevelSet) -> RevivalParams {
    let levels = set.levels();
    let e0 = levels[0];
    if levels.len() == 1 {
        return RevivalParams { a: Rational64::one(), b: e0, indices: vec![0] };
    }
    let a = levels[1..].iter().fold(Rational64::zero(), |g, &e| rational_gcd(g, e - e0));
    let b = e0 - a * (e0 / a).floor();
    let indices = levels
        .iter()
        .map(|&e| {
            let n = (e - b) / a;
            debug_assert!(n.is_integer());
            n.to_integer()
        })
        .collect();
    RevivalParams { a, b, indices }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic_levels(3).unwrap().levels(), &[r(1, 2), r(3, 2), r(5, 2)]);
        assert_eq!(harmonic_levels(1).unwrap().levels(), &[r(1, 2)]);
        assert_eq!(harmonic_levels(25).unwrap().highest(), r(49, 2));
        assert!(matches!(harmonic_levels(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn biperiodic_examples() {
        let set = biperiodic_levels(25, DEFAULT_HARMONIC_COUNT).unwrap();
        assert_eq!(set.lowest(), r(-49, 1));
        assert_eq!(set.len(), 35);
        let one = biperiodic_levels(1, 10).unwrap();
        assert_eq!(one.descending_below(Rational64::zero()), vec![r(-1, 1)]);
        let p = revival_params(&set);
        assert_eq!(p.a, r(1, 2));
        assert_eq!(p.t_rev_over_two_pi(), r(2, 1));
    }

    #[test]
    fn reverse_biperiodic_examples() {
        let set = reverse_biperiodic_levels(15, 10).unwrap();
        assert_eq!(set.lowest(), r(-7, 1));
        let one = reverse_biperiodic_levels(1, 10).unwrap();
        assert_eq!(one.descending_below(r(1, 2)), vec![r(0, 1)]);
        assert_eq!(revival_params(&set).t_rev_over_two_pi(), r(2, 1));
    }

    #[test]
    fn alternating_examples() {
        let set = alternating_gap_levels(r(1, 1), r(1, 2), 4, r(0, 1)).unwrap();
        assert_eq!(set.levels(), &[r(0, 1), r(1, 1), r(3, 2), r(5, 2)]);
        let set = alternating_gap_levels(r(1, 2), r(3, 2), 100, r(0, 1)).unwrap();
        assert_eq!(revival_params(&set).a, r(1, 2));
        let uniform = alternating_gap_levels(r(2, 3), r(2, 3), 7, r(0, 1)).unwrap();
        let expected: Vec<_> = (0..7).map(|n| r(2 * n, 3)).collect();
        assert_eq!(uniform.levels(), expected.as_slice());
        assert!(alternating_gap_levels(r(0, 1), r(1, 1), 3, r(0, 1)).is_err());
        assert!(alternating_gap_levels(r(1, 1), r(-1, 1), 3, r(0, 1)).is_err());
    }

    #[test]
    fn prime_and_fibonacci_examples() {
        let (set, base) = prime_levels(50).unwrap();
        assert_eq!(set.lowest(), r(2, 1));
        assert_eq!(set.levels()[2], r(5, 1));
        assert_eq!(set.highest(), r(229, 1));
        assert_eq!(base, r(233, 1));
        let (one, base) = prime_levels(1).unwrap();
        assert_eq!(one.levels(), &[r(2, 1)]);
        assert_eq!(base, r(3, 1));
        assert_eq!(revival_params(&set).a, r(1, 1));

        let fib = fibonacci_levels(12).unwrap();
        let expected: Vec<_> =
            [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233].iter().map(|&v| r(v, 1)).collect();
        assert_eq!(fib.levels(), expected.as_slice());
        assert_eq!(fibonacci_levels(1).unwrap().levels(), &[r(1, 1)]);
        assert_eq!(revival_params(&fib).t_rev_over_two_pi(), r(1, 1));
        assert_eq!(fibonacci_number(14), 377);
    }

    #[test]
    fn revival_params_examples() {
        let p = revival_params(&harmonic_levels(3).unwrap());
        assert_eq!((p.a, p.b), (r(1, 1), r(1, 2)));
        let set = RationalLevelSet::new(vec![r(2, 1), r(3, 1), r(5, 1), r(7, 1)], Origin::Custom)
            .unwrap();
        let p = revival_params(&set);
        assert_eq!((p.a, p.b), (r(1, 1), r(0, 1)));
        assert_eq!(p.indices, vec![2, 3, 5, 7]);
        let single = RationalLevelSet::new(vec![r(7, 2)], Origin::Custom).unwrap();
        let p = revival_params(&single);
        assert_eq!((p.a, p.b, p.indices.clone()), (r(1, 1), r(7, 2), vec![0]));
    }

    #[test]
    fn invalid_sets_rejected() {
        assert!(RationalLevelSet::new(vec![], Origin::Custom).is_err());
        assert!(RationalLevelSet::new(vec![r(1, 1), r(1, 1)], Origin::Custom).is_err());
        assert!(RationalLevelSet::new(vec![r(2, 1), r(1, 1)], Origin::Custom).is_err());
    }

    #[test]
    fn text_format() {
        let set = biperiodic_levels(2, 2).unwrap();
        let text = set.to_text();
        assert_eq!(text, "-3/1\n-1/1\n1/2\n3/2\n");
        let back = RationalLevelSet::parse_text(&format!("# comment\n{text}\n5\n")).unwrap();
        assert_eq!(back.len(), 5);
        assert_eq!(back.highest(), r(5, 1));
        assert!(RationalLevelSet::parse_text("1/0").is_err());
        assert!(RationalLevelSet::parse_text("abc").is_err());
    }

    #[test]
    fn revival_phase_matches_float_formula() {
        let p = revival_params(&biperiodic_levels(3, 4).unwrap());
        let expected = num_complex::Complex64::from_polar(
            1.0,
            -2.0 * std::f64::consts::PI * rational_to_f64(p.b / p.a),
        );
        assert!((p.revival_phase() - expected).norm() < 1e-14);
    }

    fn small_rational() -> impl Strategy<Value = Rational64> {
        (-40i64..40, 1i64..7).prop_map(|(n, d)| Rational64::new(n, d))
    }

    fn positive_rational() -> impl Strategy<Value = Rational64> {
        (1i64..12, 1i64..7).prop_map(|(n, d)| Rational64::new(n, d))
    }

    fn any_family() -> impl Strategy<Value = RationalLevelSet> {
        prop_oneof![
            (1usize..40).prop_map(|n| harmonic_levels(n).unwrap()),
            (1usize..40, 1usize..12).prop_map(|(n, h)| biperiodic_levels(n, h).unwrap()),
            (1usize..40, 1usize..12).prop_map(|(n, h)| reverse_biperiodic_levels(n, h).unwrap()),
            (positive_rational(), positive_rational(), 1usize..40, small_rational())
                .prop_map(|(g1, g2, n, e)| alternating_gap_levels(g1, g2, n, e).unwrap()),
            (1usize..60).prop_map(|n| prime_levels(n).unwrap().0),
            (1usize..40).prop_map(|n| fibonacci_levels(n).unwrap()),
        ]
    }

    fn gcd_of_differences(ns: &[i64]) -> i64 {
        ns.iter().fold(0i64, |g, &n| g.gcd(&(n - ns[0])))
    }

    proptest! {
        #[test]
        fn families_satisfy_revival_condition(set in any_family()) {
            let p = revival_params(&set);
            prop_assert!(p.a.is_positive());
            for (&e, &n) in set.levels().iter().zip(&p.indices) {
                prop_assert_eq!(p.a * Rational64::from_integer(n) + p.b, e);
            }
            if set.len() > 1 {
                prop_assert_eq!(gcd_of_differences(&p.indices), 1);
            }
        }

        #[test]
        fn scaling_covariance(set in any_family(), s in positive_rational(), c in small_rational()) {
            let p = revival_params(&set);
            let mapped: Vec<_> = set.levels().iter().map(|&e| s * e + c).collect();
            let q = revival_params(&RationalLevelSet::new(mapped, Origin::Custom).unwrap());
            if set.len() > 1 {
                prop_assert_eq!(q.a, s * p.a);
                // b is reduced into [0, a), so it is covariant modulo a
                prop_assert!(((s * p.b + c - q.b) / q.a).is_integer());
                let shift = q.indices[0] - p.indices[0];
                for (pn, qn) in p.indices.iter().zip(&q.indices) {
                    prop_assert_eq!(qn - pn, shift);
                }
            }
        }
    }
}
