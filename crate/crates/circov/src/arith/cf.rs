//! Continued-fraction expansions computed exactly from real descriptors.
//!
//! Indexing follows the usual convention for `α = a₀ + 1/(a₁ + 1/(a₂ + …))`:
//! `q₋₁ = 0`, `q₀ = 1`, `q_k = a_k q_{k−1} + q_{k−2}`.
//! Rationals are expanded with Euclid's algorithm. Quadratic surds use the
//! exact integer recurrence for `(P + √D)/Q`. No floating-point value is
//! ever consulted.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::real::Real;
use crate::error::{Error, Result};

/// Partial quotients and convergents of a real number.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuedFractionExpansion {
    /// The expanded number.
    pub alpha: Real,
    /// `a₀ = ⌊α⌋`.
    pub integer_part: BigInt,
    /// `a₁ … a_K`.
    pub partial_quotients: Vec<BigUint>,
    /// `q₁ … q_K`.
    pub denominators: Vec<BigUint>,
    /// `p₁ … p_K`.
    pub numerators: Vec<BigInt>,
    /// `max_{k ≤ K} ln(q_k)/k`.
    pub levy_sup: f64,
    /// Set when a rational input terminated before the requested depth.
    pub terminated: bool,
}

impl ContinuedFractionExpansion {
    /// `q_k` for `k ≥ −1`, if computed.
    pub fn q(&self, k: i64) -> Option<BigUint> {
        match k {
            -1 => Some(BigUint::zero()),
            0 => Some(BigUint::one()),
            k if k >= 1 => self.denominators.get(k as usize - 1).cloned(),
            _ => None,
        }
    }

    /// Largest partial quotient among `a₁ … a_K`.
    pub fn max_partial_quotient(&self) -> BigUint {
        self.partial_quotients.iter().max().cloned().unwrap_or_default()
    }

    /// Badly-approximable proxy: all computed partial quotients ≤ `cap`.
    pub fn bounded_by(&self, cap: u64) -> bool {
        let cap = BigUint::from(cap);
        self.partial_quotients.iter().all(|a| *a <= cap)
    }
}

/// Stream of partial quotients `a₀, a₁, …` of an exact real.
enum QuotientStream {
    Rational { num: BigInt, den: BigInt },
    Surd { p: BigInt, q: BigInt, d: BigInt, root: BigInt },
    Done,
}

impl QuotientStream {
    fn new(alpha: &Real) -> Self {
        match alpha {
            Real::Rational(v) => QuotientStream::Rational {
                num: v.numer().clone(),
                den: v.denom().clone(),
            },
            Real::Surd { p, q, d, r } => {
                // (p + q√d)/r = (P + √D)/Q with D = q²d.
                let d = BigInt::from(d.clone());
                let (mut big_p, big_d, mut big_q) = if q.is_negative() {
                    (-p, q * q * &d, -r)
                } else {
                    (p.clone(), q * q * &d, r.clone())
                };
                let mut big_d = big_d;
                if !(&big_d - &big_p * &big_p).is_multiple_of(&big_q) {
                    let aq = big_q.abs();
                    big_p *= &aq;
                    big_d *= &aq * &aq;
                    big_q *= aq;
                }
                let root = big_d.sqrt();
                QuotientStream::Surd {
                    p: big_p,
                    q: big_q,
                    d: big_d,
                    root,
                }
            }
        }
    }

    fn next(&mut self) -> Option<BigInt> {
        match self {
            QuotientStream::Done => None,
            QuotientStream::Rational { num, den } => {
                let (a, r) = num.div_mod_floor(den);
                if r.is_zero() {
                    *self = QuotientStream::Done;
                } else {
                    let old_den = std::mem::replace(den, r);
                    *num = old_den;
                }
                Some(a)
            }
            QuotientStream::Surd { p, q, d, root } => {
                // a = ⌊(P + √D)/Q⌋ with √D irrational
                let a = if q.is_positive() {
                    Integer::div_floor(&(&*p + &*root), &*q)
                } else {
                    let m: BigInt = -&*q;
                    -(Integer::div_floor(&(&*p + &*root), &m) + BigInt::one())
                };
                let p_next = &a * &*q - &*p;
                let q_next = (&*d - &p_next * &p_next) / &*q;
                *p = p_next;
                *q = q_next;
                Some(a)
            }
        }
    }
}

/// Expands `alpha` to depth `depth` (all quotients for rationals when `None`).
///
/// Irrational input with `depth = None` is rejected, since the expansion never ends.
pub fn continued_fraction(alpha: &Real, depth: Option<usize>) -> Result<ContinuedFractionExpansion> {
    if depth.is_none() && !alpha.is_rational() {
        return Err(Error::InvalidInput(
            "an unbounded expansion was requested for an irrational number".into(),
        ));
    }
    let mut stream = QuotientStream::new(alpha);
    let a0 = stream.next().expect("first quotient always exists");
    let (mut q_prev, mut q_cur) = (BigUint::zero(), BigUint::one());
    let (mut p_prev, mut p_cur) = (BigInt::one(), a0.clone());
    let mut out = ContinuedFractionExpansion {
        alpha: alpha.clone(),
        integer_part: a0,
        partial_quotients: Vec::new(),
        denominators: Vec::new(),
        numerators: Vec::new(),
        levy_sup: 0.0,
        terminated: false,
    };
    let limit = depth.unwrap_or(usize::MAX);
    while out.partial_quotients.len() < limit {
        let Some(a) = stream.next() else {
            out.terminated = true;
            break;
        };
        let a = a.to_biguint().expect("partial quotients after a₀ are positive");
        let q_next = &a * &q_cur + &q_prev;
        let p_next = BigInt::from(a.clone()) * &p_cur + &p_prev;
        q_prev = std::mem::replace(&mut q_cur, q_next.clone());
        p_prev = std::mem::replace(&mut p_cur, p_next.clone());
        let k = out.denominators.len() + 1;
        let lq = ln_big(&q_next) / k as f64;
        out.levy_sup = out.levy_sup.max(lq);
        out.partial_quotients.push(a);
        out.denominators.push(q_next);
        out.numerators.push(p_next);
    }
    if depth.is_some() && matches!(stream, QuotientStream::Done) && out.partial_quotients.len() < limit {
        out.terminated = true;
    }
    Ok(out)
}

/// Expands until the first denominator strictly greater than `bound`.
pub fn expand_past(alpha: &Real, bound: &BigUint) -> Result<ContinuedFractionExpansion> {
    let mut depth = 8;
    loop {
        let cf = continued_fraction(alpha, Some(depth))?;
        if cf.terminated || cf.denominators.last().is_some_and(|q| q > bound) {
            return Ok(cf);
        }
        depth *= 2;
    }
}

pub(crate) fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let s = bits - 60;
    (x >> s as usize).to_f64().unwrap().ln() + s as f64 * std::f64::consts::LN_2
}

/// `|α − p/q| < 1/(q·q')` decided at `bits` of precision.
pub fn convergent_error_ok(alpha: &Real, p: &BigInt, q: &BigUint, q_next: &BigUint, bits: u32) -> Option<bool> {
    let e = alpha.enclose(bits);
    let qi = BigInt::from(q.clone());
    // |α − p/q|·q·q' vs 1 → |α·q − p|·q' < 1, scaled by 2^bits
    let target = BigInt::one() << bits as usize;
    let lo = &e.lo * &qi - (p << bits as usize);
    let hi = &e.hi * &qi - (p << bits as usize);
    let qn = BigInt::from(q_next.clone());
    let max_abs = lo.abs().max(hi.abs()) * &qn;
    let min_abs = if lo.sign() != hi.sign() {
        BigInt::zero()
    } else {
        lo.abs().min(hi.abs()) * &qn
    };
    if max_abs < target {
        Some(true)
    } else if min_abs >= target {
        Some(false)
    } else {
        None
    }
}

/// Approximate value of a convergent for reports.
pub fn convergent_f64(p: &BigInt, q: &BigUint) -> f64 {
    BigRational::new(p.clone(), BigInt::from(q.clone()))
        .to_f64()
        .unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_list(cf: &ContinuedFractionExpansion) -> Vec<u64> {
        cf.denominators.iter().map(|q| q.to_u64().unwrap()).collect()
    }

    #[test]
    fn golden_ratio_gives_fibonacci() {
        let cf = continued_fraction(&Real::golden(), Some(10)).unwrap();
        assert_eq!(q_list(&cf), vec![1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
        assert!(cf.partial_quotients.iter().all(|a| a.is_one()));
        assert!(!cf.terminated);
    }

    #[test]
    fn silver_ratio_is_periodic() {
        let cf = continued_fraction(&Real::silver(), Some(5)).unwrap();
        let a: Vec<u64> = cf.partial_quotients.iter().map(|a| a.to_u64().unwrap()).collect();
        assert_eq!(a, vec![2, 2, 2, 2, 2]);
        assert_eq!(q_list(&cf), vec![2, 5, 12, 29, 70]);
    }

    #[test]
    fn rational_terminates_with_flag() {
        let cf = continued_fraction(&Real::ratio(3, 7), None).unwrap();
        let a: Vec<u64> = cf.partial_quotients.iter().map(|a| a.to_u64().unwrap()).collect();
        assert_eq!(a, vec![2, 3]);
        assert!(cf.terminated);
        assert_eq!(cf.numerators.last().unwrap(), &BigInt::from(3));
        assert_eq!(cf.denominators.last().unwrap(), &BigUint::from(7u32));
        let short = continued_fraction(&Real::ratio(3, 7), Some(10)).unwrap();
        assert!(short.terminated);
        assert!(continued_fraction(&Real::golden(), None).is_err());
    }

    #[test]
    fn surds_with_awkward_denominators() {
        // √7 = [2; 1,1,1,4, …]
        let cf = continued_fraction(&"sqrt(7)".parse().unwrap(), Some(8)).unwrap();
        let a: Vec<u64> = cf.partial_quotients.iter().map(|a| a.to_u64().unwrap()).collect();
        assert_eq!(cf.integer_part, BigInt::from(2));
        assert_eq!(a, vec![1, 1, 1, 4, 1, 1, 1, 4]);
        // (1 − 2√7)/5 ≈ −0.8583: a₀ = −1, then expansion of 0.1417 …
        let r: Real = "surd(1,-2,7,5)".parse().unwrap();
        let cf = continued_fraction(&r, Some(12)).unwrap();
        assert_eq!(cf.integer_part, BigInt::from(-1));
        let v = r.to_f64();
        let (p, q) = (cf.numerators.last().unwrap(), cf.denominators.last().unwrap());
        assert!((convergent_f64(p, q) - v).abs() < 1e-9);
    }

    #[test]
    fn convergents_satisfy_the_error_bound() {
        for alpha in [Real::golden(), Real::silver(), "sqrt(13)".parse().unwrap()] {
            let cf = continued_fraction(&alpha, Some(30)).unwrap();
            for k in 0..29 {
                let ok = convergent_error_ok(&alpha, &cf.numerators[k], &cf.denominators[k], &cf.denominators[k + 1], 512);
                assert_eq!(ok, Some(true), "k = {k}");
            }
        }
    }

    #[test]
    fn levy_sup_of_golden_ratio() {
        let cf = continued_fraction(&Real::golden(), Some(60)).unwrap();
        // ln q_k / k ↑ ln φ ≈ 0.4812
        assert!(cf.levy_sup < 0.4813 && cf.levy_sup > 0.45);
    }
}
