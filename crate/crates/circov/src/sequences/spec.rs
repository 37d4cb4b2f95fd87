//! Sequence descriptions and exact term generation.
//!
//! Terms are indexed from `n = 1`. Integer variants produce exact big
//! integers; real-valued variants produce [`Ball`] enclosures, so every later
//! use (ratios, `{qₙx}`) can check how much precision is left.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::arithmetic::primes_up_to;
use crate::arith::real::parse_rational;
use crate::arith::{Ball, Real, UnitPoint, Wide};
use crate::error::{exhausted, Error, Result};

/// Integer lacunary rules `qₙ = baseⁿ + offset`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LacunaryRule {
    pub base: u64,
    pub offset: i64,
}

/// Generator description for `(qₙ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum SequenceSpec {
    /// `qₙ = q₀·r^{n−1}`; exact when both are integers.
    GeometricReal { q0: Real, r: Real },
    /// `qₙ = baseⁿ + offset`.
    IntegerLacunary(LacunaryRule),
    /// `qₙ = P(n₀ + n − 1)` with ascending integer coefficients, where `n₀`
    /// is the first index from which `P` is positive and strictly increasing.
    Polynomial { coefficients: Vec<i64> },
    /// `qₙ = pₙ^d` with `pₙ` the `n`-th prime.
    PrimePower { d: u32 },
    /// `qₙ = ⌊n^{a/b}⌋` with `a/b > 1`.
    PiatetskiShapiro { a: u32, b: u32 },
    /// `qₙ = exp(n^{a/b})`.
    ExpPower { a: u32, b: u32 },
    /// A user supplied strictly increasing list of positive integers.
    Explicit { terms: Vec<BigUint> },
}

/// Coarse growth class a generator claims for itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthClaim {
    /// Hadamard gap: ratios bounded below by some `r > 1`.
    Lacunary,
    /// Ratios `1 + 1/Φ(n)` with slowly growing `Φ`.
    SubLacunary,
    /// Polynomial growth.
    Polynomial,
    /// Nothing is claimed.
    Unknown,
}

/// One exact or enclosed sequence term.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Int(BigUint),
    /// `2^k`, kept symbolic so huge powers cost nothing to store.
    Pow2(u64),
    Real(Ball),
}

impl Term {
    /// Exact integer value, materialising powers of two.
    pub fn to_biguint(&self) -> Option<BigUint> {
        match self {
            Term::Int(q) => Some(q.clone()),
            Term::Pow2(k) => Some(BigUint::one() << *k as usize),
            Term::Real(_) => None,
        }
    }

    /// Approximate natural logarithm.
    pub fn ln(&self) -> f64 {
        match self {
            Term::Int(q) => crate::arith::cf::ln_big(q),
            Term::Pow2(k) => *k as f64 * std::f64::consts::LN_2,
            Term::Real(b) => b.ln(),
        }
    }

    /// Enclosure as a ball with at least `prec` bits.
    pub fn to_ball(&self, prec: u32) -> Ball {
        match self {
            Term::Real(b) => b.clone(),
            other => Ball::from_int(&other.to_biguint().expect("integer term"), prec),
        }
    }

    /// Fractional part `{q·x}` as a 128-bit enclosure.
    pub fn frac_mul(&self, x: &UnitPoint) -> Result<Wide> {
        match self {
            Term::Int(q) => {
                if let Some(small) = q.to_u64() {
                    if let Some(w) = x.to_wide().mul_int(small) {
                        if w.rad <= 1u128 << 64 {
                            return Ok(w);
                        }
                    }
                }
                x.frac_mul(q)
            }
            Term::Pow2(k) => x.frac_mul_pow2(*k),
            Term::Real(b) => b.frac_mul(x),
        }
    }

    /// Compares `self·a` with `other·b` for positive integer scales.
    pub fn cmp_scaled(&self, a: &BigUint, other: &Term, b: &BigUint, prec: u32) -> Result<Ordering> {
        match (self, other) {
            (Term::Pow2(i), Term::Pow2(j)) if a.is_one() && b.is_one() => Ok(i.cmp(j)),
            (Term::Real(_), _) | (_, Term::Real(_)) => {
                let l = self.to_ball(prec).mul(&Ball::from_int(a, prec));
                let r = other.to_ball(prec).mul(&Ball::from_int(b, prec));
                l.try_cmp(&r)
                    .ok_or_else(|| exhausted("comparing real sequence terms", prec))
            }
            _ => {
                let l = self.to_biguint().expect("integer") * a;
                let r = other.to_biguint().expect("integer") * b;
                Ok(l.cmp(&r))
            }
        }
    }

    /// Approximate value for display.
    pub fn to_f64(&self) -> f64 {
        self.ln().exp()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(q) => write!(f, "{q}"),
            Term::Pow2(k) if *k < 128 => write!(f, "{}", BigUint::one() << *k as usize),
            Term::Pow2(k) => write!(f, "2^{k}"),
            Term::Real(b) => write!(f, "{:.6e}", b.to_f64()),
        }
    }
}

impl SequenceSpec {
    /// `qₙ = 2ⁿ`.
    pub fn powers_of_two() -> Self {
        SequenceSpec::IntegerLacunary(LacunaryRule { base: 2, offset: 0 })
    }

    /// `qₙ = n^d`.
    pub fn monomial(d: u32) -> Self {
        let mut coefficients = vec![0; d as usize + 1];
        coefficients[d as usize] = 1;
        SequenceSpec::Polynomial { coefficients }
    }

    /// `⌊n^c⌋` for a rational exponent `c > 1` given as a decimal or fraction.
    pub fn piatetski_shapiro(c: &str) -> Result<Self> {
        let (a, b) = small_fraction(c)?;
        if a <= b {
            return Err(Error::InvalidInput("the exponent c must exceed 1".into()));
        }
        Ok(SequenceSpec::PiatetskiShapiro { a, b })
    }

    /// Loads an explicit list from newline-delimited decimal integers.
    pub fn explicit_from_text(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let q = BigUint::from_str(line)
                .map_err(|_| Error::InvalidInput(format!("line {}: {line:?} is not a positive integer", i + 1)))?;
            terms.push(q);
        }
        Self::explicit(terms)
    }

    /// Explicit list; rejected unless positive and strictly increasing.
    pub fn explicit(terms: Vec<BigUint>) -> Result<Self> {
        if let Some(first) = terms.first() {
            if first.is_zero() {
                return Err(Error::InvalidInput("explicit terms must be positive".into()));
            }
        }
        if let Some(i) = terms.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "explicit sequence is not strictly increasing at index {}",
                i + 2
            )));
        }
        Ok(SequenceSpec::Explicit { terms })
    }

    /// `true` for variants with integer terms.
    pub fn is_integer(&self) -> bool {
        match self {
            SequenceSpec::GeometricReal { q0, r } => is_integer_real(q0) && is_integer_real(r),
            SequenceSpec::ExpPower { .. } => false,
            _ => true,
        }
    }

    /// The growth class this generator claims.
    pub fn claimed_growth(&self) -> GrowthClaim {
        match self {
            SequenceSpec::GeometricReal { .. } | SequenceSpec::IntegerLacunary(_) => GrowthClaim::Lacunary,
            SequenceSpec::ExpPower { .. } => GrowthClaim::SubLacunary,
            SequenceSpec::Polynomial { .. } | SequenceSpec::PrimePower { .. } | SequenceSpec::PiatetskiShapiro { .. } => {
                GrowthClaim::Polynomial
            }
            SequenceSpec::Explicit { .. } => GrowthClaim::Unknown,
        }
    }
}

fn is_integer_real(x: &Real) -> bool {
    x.as_rational().is_some_and(|q| q.is_integer())
}

fn small_fraction(text: &str) -> Result<(u32, u32)> {
    let q = parse_rational(text)?;
    let a = q.numer().to_u32();
    let b = q.denom().to_u32();
    match (a, b) {
        (Some(a), Some(b)) if a > 0 => Ok((a, b)),
        _ => Err(Error::InvalidInput(format!("exponent {text:?} must be a small positive fraction"))),
    }
}

impl FromStr for SequenceSpec {
    type Err = Error;

    /// Accepted forms: `pow2`, `lacunary:b[:offset]`, `geom:q0:r`,
    /// `poly:c0,c1,…` (ascending), `monomial:d`, `square`, `primepow:d`,
    /// `ps:c`, `exp:θ`, `list:q1,q2,…`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let field = |i: usize| -> Result<&str> {
            rest.split(':')
                .nth(i)
                .filter(|f| !f.is_empty())
                .ok_or_else(|| Error::InvalidInput(format!("sequence {s:?}: missing field {}", i + 1)))
        };
        let int = |t: &str| -> Result<i64> {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidInput(format!("bad integer {t:?}")))
        };
        match head {
            "pow2" => Ok(Self::powers_of_two()),
            "square" => Ok(Self::monomial(2)),
            "lacunary" => {
                let base = int(field(0)?)?;
                let offset = rest.split(':').nth(1).map(int).transpose()?.unwrap_or(0);
                if base < 2 {
                    return Err(Error::InvalidInput("lacunary base must be at least 2".into()));
                }
                Ok(SequenceSpec::IntegerLacunary(LacunaryRule {
                    base: base as u64,
                    offset,
                }))
            }
            "geom" => Ok(SequenceSpec::GeometricReal {
                q0: field(0)?.parse()?,
                r: field(1)?.parse()?,
            }),
            "poly" => {
                let coefficients = field(0)?.split(',').map(int).collect::<Result<Vec<_>>>()?;
                Ok(SequenceSpec::Polynomial { coefficients })
            }
            "monomial" => Ok(Self::monomial(int(field(0)?)? as u32)),
            "primepow" => Ok(SequenceSpec::PrimePower {
                d: int(field(0)?)? as u32,
            }),
            "ps" => Self::piatetski_shapiro(field(0)?),
            "exp" => {
                let (a, b) = small_fraction(field(0)?)?;
                Ok(SequenceSpec::ExpPower { a, b })
            }
            "list" => Self::explicit_from_text(&field(0)?.replace(',', "\n")),
            _ => Err(Error::InvalidInput(format!("unknown sequence {s:?}"))),
        }
    }
}

/// A sequence prepared for term evaluation up to a maximum index.
#[derive(Debug, Clone)]
pub struct Sequence {
    spec: SequenceSpec,
    precision: u32,
    max_index: u64,
    primes: Vec<u64>,
    poly_start: u64,
    geometric: Option<(Ball, Ball)>,
}

impl Sequence {
    /// Validates `spec` and precomputes what term evaluation needs for `n ≤ max_index`.
    pub fn new(spec: SequenceSpec, max_index: u64, precision: u32) -> Result<Self> {
        let mut seq = Sequence {
            spec,
            precision,
            max_index,
            primes: Vec::new(),
            poly_start: 1,
            geometric: None,
        };
        match &seq.spec {
            SequenceSpec::GeometricReal { q0, r } => {
                let q0v = q0.to_f64();
                let rv = r.to_f64();
                if q0v <= 0.0 || rv <= 1.0 {
                    return Err(Error::InvalidInput("geometric sequences need q₀ > 0 and r > 1".into()));
                }
                if !seq.spec.is_integer() {
                    seq.geometric = Some((Ball::from_real(q0, precision)?, Ball::from_real(r, precision)?));
                }
            }
            SequenceSpec::IntegerLacunary(rule) => {
                if rule.base < 2 {
                    return Err(Error::InvalidInput("lacunary base must be at least 2".into()));
                }
                if rule.offset < 0 && rule.offset.unsigned_abs() >= rule.base {
                    return Err(Error::InvalidInput("offset makes the first term nonpositive".into()));
                }
            }
            SequenceSpec::Polynomial { coefficients } => {
                seq.poly_start = polynomial_start(coefficients)?;
            }
            SequenceSpec::PrimePower { d } => {
                if *d == 0 {
                    return Err(Error::InvalidInput("prime power exponent must be at least 1".into()));
                }
                seq.primes = first_primes(max_index);
            }
            SequenceSpec::PiatetskiShapiro { a, b } => {
                if a <= b {
                    return Err(Error::InvalidInput("the exponent c must exceed 1".into()));
                }
            }
            SequenceSpec::ExpPower { a, b } => {
                if *a == 0 || *b == 0 {
                    return Err(Error::InvalidInput("exp(n^θ) needs θ > 0".into()));
                }
            }
            SequenceSpec::Explicit { terms } => {
                if (max_index as usize) > terms.len() {
                    return Err(Error::InvalidInput(format!(
                        "explicit sequence has {} terms, {max_index} requested",
                        terms.len()
                    )));
                }
            }
        }
        Ok(seq)
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn max_index(&self) -> u64 {
        self.max_index
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// The term `qₙ` for `1 ≤ n ≤ max_index`.
    pub fn term(&self, n: u64) -> Result<Term> {
        if n == 0 || n > self.max_index {
            return Err(Error::InvalidInput(format!("term index {n} outside 1..={}", self.max_index)));
        }
        Ok(match &self.spec {
            SequenceSpec::GeometricReal { q0, r } => match &self.geometric {
                Some((b0, br)) => Term::Real(b0.mul(&br.pow(n - 1))),
                None => {
                    let q0 = int_of(q0);
                    let r = int_of(r);
                    match (power_of_two(&q0), power_of_two(&r)) {
                        (Some(a), Some(b)) => Term::Pow2(a + b * (n - 1)),
                        _ => Term::Int(q0 * num_traits::pow(r, (n - 1) as usize)),
                    }
                }
            },
            SequenceSpec::IntegerLacunary(LacunaryRule { base, offset }) => {
                if *offset == 0 && base.is_power_of_two() {
                    Term::Pow2(base.trailing_zeros() as u64 * n)
                } else {
                    let p = num_traits::pow(BigUint::from(*base), n as usize);
                    Term::Int(if *offset >= 0 {
                        p + offset.unsigned_abs()
                    } else {
                        p - offset.unsigned_abs()
                    })
                }
            }
            SequenceSpec::Polynomial { coefficients } => {
                let v = eval_poly(coefficients, self.poly_start + n - 1);
                Term::Int(v.to_biguint().expect("positive on the shifted range"))
            }
            SequenceSpec::PrimePower { d } => {
                Term::Int(num_traits::pow(BigUint::from(self.primes[(n - 1) as usize]), *d as usize))
            }
            SequenceSpec::PiatetskiShapiro { a, b } => {
                Term::Int(num_traits::pow(BigUint::from(n), *a as usize).nth_root(*b))
            }
            SequenceSpec::ExpPower { a, b } => Term::Real(Ball::rational_power(n, *a, *b, self.precision).exp()?),
            SequenceSpec::Explicit { terms } => Term::Int(terms[(n - 1) as usize].clone()),
        })
    }

    /// Terms `q₁ … q_count`, verified strictly increasing.
    pub fn terms(&self, count: u64) -> Result<Vec<Term>> {
        let out = (1..=count).map(|n| self.term(n)).collect::<Result<Vec<_>>>()?;
        let one = BigUint::one();
        for (i, w) in out.windows(2).enumerate() {
            if w[1].cmp_scaled(&one, &w[0], &one, self.precision)? != Ordering::Greater {
                return Err(Error::InvalidInput(format!(
                    "generated sequence is not strictly increasing at index {}",
                    i + 2
                )));
            }
        }
        Ok(out)
    }

    /// `{qₙ·x}` as a 128-bit enclosure.
    pub fn point(&self, n: u64, x: &UnitPoint) -> Result<Wide> {
        self.term(n)?.frac_mul(x)
    }
}

/// First `count` terms of `spec`, verified strictly increasing.
pub fn generate(spec: &SequenceSpec, count: u64, precision: u32) -> Result<Vec<Term>> {
    if count == 0 {
        return Err(Error::InvalidInput("at least one term must be requested".into()));
    }
    Sequence::new(spec.clone(), count, precision)?.terms(count)
}

fn int_of(x: &Real) -> BigUint {
    x.as_rational()
        .and_then(|q| q.to_integer().to_biguint())
        .expect("checked integer")
}

fn power_of_two(x: &BigUint) -> Option<u64> {
    let tz = x.trailing_zeros()?;
    (x >> tz as usize).is_one().then_some(tz)
}

fn eval_poly(coefficients: &[i64], n: u64) -> num_bigint::BigInt {
    let x = num_bigint::BigInt::from(n);
    coefficients
        .iter()
        .rev()
        .fold(num_bigint::BigInt::zero(), |acc, &c| acc * &x + c)
}

/// Smallest `n₀ ≥ 1` such that `P` is positive and strictly increasing on `[n₀, ∞)`.
fn polynomial_start(coefficients: &[i64]) -> Result<u64> {
    let degree = coefficients
        .iter()
        .rposition(|&c| c != 0)
        .ok_or_else(|| Error::InvalidInput("the zero polynomial is not a sequence".into()))?;
    let lead = coefficients[degree];
    if degree == 0 || lead <= 0 {
        return Err(Error::InvalidInput(
            "polynomial sequences need positive degree and a positive leading coefficient".into(),
        ));
    }
    // Cauchy bound: every real root of P and of P(x+1) − P(x) is below 1 + Σ|aᵢ|·C/|a_d|
    // for a modest C; a generous explicit bound is found by doubling instead.
    let ok = |n: u64| {
        let v = eval_poly(coefficients, n);
        v.is_positive() && eval_poly(coefficients, n + 1) > v
    };
    let sum: u64 = coefficients.iter().map(|c| c.unsigned_abs()).sum();
    let mut bound = 2 + 2 * sum / lead.unsigned_abs() * (degree as u64 + 1);
    // beyond `bound`, P and its forward difference are dominated by the leading term
    while !ok(bound) {
        bound *= 2;
    }
    let mut start = bound;
    while start > 1 && ok(start - 1) {
        start -= 1;
    }
    Ok(start)
}

/// The first `count` primes.
pub fn first_primes(count: u64) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    let c = count.max(6) as f64;
    let bound = (c * (c.ln() + c.ln().ln())).ceil() as u64 + 10;
    let mut p = primes_up_to(bound);
    p.truncate(count as usize);
    p
}

/// Parses a length-rule or sequence exponent given as a rational.
pub fn parse_exponent(text: &str) -> Result<BigRational> {
    parse_rational(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(spec: &SequenceSpec, n: u64) -> Vec<u64> {
        generate(spec, n, 256)
            .unwrap()
            .iter()
            .map(|t| t.to_biguint().unwrap().to_u64().unwrap())
            .collect()
    }

    #[test]
    fn geometric_integer_sequence() {
        let spec = SequenceSpec::GeometricReal {
            q0: Real::integer(1),
            r: Real::integer(2),
        };
        assert_eq!(ints(&spec, 5), vec![1, 2, 4, 8, 16]);
        let spec = SequenceSpec::GeometricReal {
            q0: Real::integer(3),
            r: Real::integer(10),
        };
        assert_eq!(ints(&spec, 3), vec![3, 30, 300]);
    }

    #[test]
    fn prime_squares() {
        assert_eq!(ints(&SequenceSpec::PrimePower { d: 2 }, 4), vec![4, 9, 25, 49]);
        assert_eq!(first_primes(1000).last(), Some(&7919));
    }

    #[test]
    fn piatetski_shapiro_floor_powers() {
        let spec = SequenceSpec::piatetski_shapiro("1.5").unwrap();
        assert_eq!(ints(&spec, 5), vec![1, 2, 5, 8, 11]);
    }

    #[test]
    fn polynomial_start_is_shifted() {
        // n² − 6n + 10 is increasing from n = 3 on: 1, 2, 5, 10, …
        let spec = SequenceSpec::Polynomial {
            coefficients: vec![10, -6, 1],
        };
        assert_eq!(ints(&spec, 4), vec![1, 2, 5, 10]);
        // 2n − 5: positive from n = 3
        let spec = SequenceSpec::Polynomial {
            coefficients: vec![-5, 2],
        };
        assert_eq!(ints(&spec, 3), vec![1, 3, 5]);
        assert!(Sequence::new(SequenceSpec::Polynomial { coefficients: vec![3, 0, -1] }, 3, 64).is_err());
    }

    #[test]
    fn explicit_lists_must_increase() {
        assert!(SequenceSpec::explicit_from_text("1\n3\n3\n").is_err());
        assert!(SequenceSpec::explicit_from_text("0\n3\n").is_err());
        let spec = SequenceSpec::explicit_from_text("2\n\n7\n9\n").unwrap();
        assert_eq!(ints(&spec, 3), vec![2, 7, 9]);
        assert!(generate(&spec, 4, 64).is_err());
    }

    #[test]
    fn real_geometric_terms_are_enclosed() {
        let spec: SequenceSpec = "geom:1:golden".parse().unwrap();
        assert!(generate(&spec, 3, 128).is_err(), "golden < 1 is not lacunary");
        let spec: SequenceSpec = "geom:1:3/2".parse().unwrap();
        let t = generate(&spec, 6, 256).unwrap();
        assert!((t[5].to_f64() - 1.5f64.powi(5)).abs() < 1e-9);
    }

    #[test]
    fn exp_power_terms() {
        let t = generate(&"exp:1/2".parse().unwrap(), 4, 128).unwrap();
        assert!((t[3].ln() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn symbolic_powers_of_two() {
        let seq = Sequence::new("pow2".parse().unwrap(), 1 << 20, 64).unwrap();
        assert_eq!(seq.term(1 << 20).unwrap(), Term::Pow2(1 << 20));
        let x = UnitPoint::from_real(&Real::ratio(1, 3), 512).unwrap();
        // {2·(1/3)} = 2/3
        assert!((seq.point(1, &x).unwrap().to_f64() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn parsing_round_trips_through_serde() {
        for text in ["pow2", "lacunary:3:1", "poly:1,0,2", "primepow:2", "ps:3/2", "exp:0.5", "list:1,2,5"] {
            let spec: SequenceSpec = text.parse().unwrap();
            let json = serde_json::to_string(&spec).unwrap();
            let back: SequenceSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(spec, back, "{text}");
        }
    }
}
