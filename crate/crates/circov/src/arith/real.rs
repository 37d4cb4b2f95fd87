//! Exact descriptors for the real numbers that enter experiments.
//!
//! A [`Real`] is never stored as a float. It is either a rational number
//! or a quadratic surd `(p + q·√d)/r`. Decimal strings parse to rationals.
//! [`Real::enclose`] evaluates a descriptor to any bit precision as a rigorous
//! integer enclosure.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exactly specified real number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Real {
    /// A rational number `num/den`.
    Rational(BigRational),
    /// The quadratic surd `(p + q·√d)/r` with `r ≠ 0` and `d` not a perfect square.
    Surd {
        p: BigInt,
        q: BigInt,
        d: BigUint,
        r: BigInt,
    },
}

/// Integer enclosure of `value · 2^bits`: the scaled value lies in `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

impl Real {
    /// The golden-ratio conjugate `(√5 − 1)/2`.
    pub fn golden() -> Self {
        Self::surd(-1, 1, 5u32, 2).expect("valid surd")
    }

    /// `√2 − 1`.
    pub fn silver() -> Self {
        Self::surd(-1, 1, 2u32, 1).expect("valid surd")
    }

    /// Builds `(p + q·√d)/r`, collapsing to a rational when `q = 0` or `d` is a square.
    pub fn surd(
        p: impl Into<BigInt>,
        q: impl Into<BigInt>,
        d: impl Into<BigUint>,
        r: impl Into<BigInt>,
    ) -> Result<Self> {
        let (p, q, d, r) = (p.into(), q.into(), d.into(), r.into());
        if r.is_zero() {
            return Err(Error::InvalidInput("surd denominator is zero".into()));
        }
        let root = d.sqrt();
        if q.is_zero() || &root * &root == d {
            let num = p + q * BigInt::from(root);
            return Ok(Real::Rational(BigRational::new(num, r)));
        }
        Ok(Real::Surd { p, q, d, r })
    }

    /// Rational `num/den`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Real::Rational(BigRational::new(num.into(), den.into()))
    }

    /// Integer value.
    pub fn integer(n: i64) -> Self {
        Real::Rational(BigRational::from_integer(n.into()))
    }

    /// Returns the rational value, if this descriptor is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Real::Rational(q) => Some(q),
            Real::Surd { .. } => None,
        }
    }

    /// Rigorous enclosure of `self · 2^bits` by integers.
    pub fn enclose(&self, bits: u32) -> Enclosure {
        match self {
            Real::Rational(v) => {
                let scaled = v.numer() << bits as usize;
                let (lo, rem) = scaled.div_mod_floor(v.denom());
                let hi = if rem.is_zero() { lo.clone() } else { &lo + 1 };
                Enclosure { lo, hi, bits }
            }
            Real::Surd { p, q, d, r } => {
                // √d · 2^bits ∈ [s, s + 1)
                let s = BigInt::from((d << (2 * bits as usize)).sqrt());
                let (p, q, r) = if r.is_negative() {
                    (-p, -q, -r)
                } else {
                    (p.clone(), q.clone(), r.clone())
                };
                let t = (p << bits as usize) + &q * &s;
                let (a, b) = if q.is_negative() {
                    (&t + &q, t)
                } else {
                    (t.clone(), &t + &q)
                };
                let lo = a.div_floor(&r);
                let hi = b.div_ceil(&r);
                Enclosure { lo, hi, bits }
            }
        }
    }

    /// Floating point approximation, for reporting only.
    pub fn to_f64(&self) -> f64 {
        let e = self.enclose(80);
        let mid: BigInt = (&e.lo + &e.hi) >> 1usize;
        mid.to_f64().unwrap_or(f64::NAN) / 2f64.powi(80)
    }

    /// `true` when the descriptor is rational.
    pub fn is_rational(&self) -> bool {
        matches!(self, Real::Rational(_))
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| Error::InvalidInput(format!("bad integer {s:?}")))
}

/// Parses a rational given as an integer, `num/den`, or a decimal literal.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    s.parse::<Real>()?
        .as_rational()
        .cloned()
        .ok_or_else(|| Error::InvalidInput(format!("{s:?} is not rational")))
}

/// Parses a decimal literal such as `-12.5e-3` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("bad decimal literal {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    })
}

impl FromStr for Real {
    type Err = Error;

    /// Accepted forms: `golden`, `silver`, `sqrt(d)`, `surd(p,q,d,r)`,
    /// `num/den`, and decimal literals.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "golden" => return Ok(Real::golden()),
            "silver" => return Ok(Real::silver()),
            _ => {}
        }
        if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let d = parse_int(inner)?;
            let d = d
                .to_biguint()
                .ok_or_else(|| Error::InvalidInput("negative radicand".into()))?;
            return Real::surd(0, 1, d, 1);
        }
        if let Some(inner) = t.strip_prefix("surd(").and_then(|r| r.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::InvalidInput(format!("surd needs 4 fields: {t:?}")));
            }
            let d = parse_int(parts[2])?
                .to_biguint()
                .ok_or_else(|| Error::InvalidInput("negative radicand".into()))?;
            return Real::surd(parse_int(parts[0])?, parse_int(parts[1])?, d, parse_int(parts[3])?);
        }
        if let Some((a, b)) = t.split_once('/') {
            let den = parse_int(b)?;
            if den.is_zero() {
                return Err(Error::InvalidInput("zero denominator".into()));
            }
            return Ok(Real::Rational(BigRational::new(parse_int(a)?, den)));
        }
        Ok(Real::Rational(parse_decimal(t)?))
    }
}

impl TryFrom<String> for Real {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Real> for String {
    fn from(r: Real) -> String {
        r.to_string()
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rational(q) if q.denom().is_one() => write!(f, "{}", q.numer()),
            Real::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Real::Surd { p, q, d, r } => write!(f, "surd({p},{q},{d},{r})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_decimal("-0.1").unwrap(), BigRational::new((-1).into(), 10.into()));
        assert_eq!(parse_decimal("1.5e2").unwrap(), BigRational::from_integer(150.into()));
        assert_eq!(parse_decimal("3").unwrap(), BigRational::from_integer(3.into()));
        assert!(parse_decimal("abc").is_err());
        assert!(parse_decimal("").is_err());
    }

    #[test]
    fn enclosures_bracket_the_value() {
        let g = Real::golden();
        let e = g.enclose(64);
        let lo = e.lo.to_f64().unwrap() / 2f64.powi(64);
        assert!((lo - 0.618_033_988_749_894_9).abs() < 1e-15);
        assert!(&e.hi - &e.lo <= BigInt::from(2));
        let third = Real::ratio(1, 3).enclose(10);
        assert_eq!(third.lo, BigInt::from(341));
        assert_eq!(third.hi, BigInt::from(342));
        let quarter = Real::ratio(1, 4).enclose(10);
        assert_eq!(quarter.lo, quarter.hi);
    }

    #[test]
    fn square_radicands_collapse_to_rationals() {
        assert_eq!(Real::surd(1, 1, 4u32, 3).unwrap(), Real::integer(1));
        assert!("sqrt(9)".parse::<Real>().unwrap().is_rational());
    }

    #[test]
    fn display_round_trips() {
        for s in ["golden", "silver", "3/7", "0.3", "surd(1,-2,7,5)", "-4"] {
            let r: Real = s.parse().unwrap();
            let back: Real = r.to_string().parse().unwrap();
            assert_eq!(r, back);
        }
    }

    #[test]
    fn negative_surd_enclosure() {
        // (1 - 2√7)/5 ≈ -0.85830
        let r: Real = "surd(1,-2,7,5)".parse().unwrap();
        assert!((r.to_f64() + 0.858_300_524_425_836_4).abs() < 1e-12);
    }
}
