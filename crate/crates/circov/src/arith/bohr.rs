//! Diophantine Bohr sets `{n ≤ N : ∥nα − γ∥ < ε}`.
//!
//! This module provides the exact count by enumeration and the classical
//! two-sided bracket `⌊M⌋ ≤ count ≤ 32M` for homogeneous Bohr sets. It also
//! counts the annuli `ε/b ≤ ∥nα − γ∥ < ε`, whose size is comparable to `Nε`
//! for badly approximable `α`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use super::cf::{continued_fraction, expand_past};
use super::real::Real;
use super::unit::{CircleOrbit, Threshold};
use crate::error::{Error, Result};

/// Parameters of a Bohr-set query.
#[derive(Debug, Clone, PartialEq)]
pub struct BohrQuery {
    pub alpha: Real,
    pub gamma: Real,
    /// Horizon `N ≥ 1`.
    pub n: u64,
    /// Radius `ε > 0`.
    pub eps: BigRational,
    /// Annulus ratio `b` (only used by [`annulus_count`]).
    pub b: u64,
    /// Working precision in bits.
    pub precision: u32,
}

impl BohrQuery {
    pub fn new(alpha: Real, gamma: Real, n: u64, eps: BigRational) -> Self {
        Self {
            alpha,
            gamma,
            n,
            eps,
            b: 300,
            precision: super::unit::DEFAULT_PRECISION,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("Bohr horizon N must be ≥ 1".into()));
        }
        if !self.eps.is_positive() {
            return Err(Error::InvalidInput("Bohr radius ε must be positive".into()));
        }
        Ok(())
    }

    /// The same query with `γ = 0` and radius scaled by `factor`.
    pub fn homogeneous_scaled(&self, factor: &BigRational) -> Self {
        Self {
            gamma: Real::integer(0),
            eps: &self.eps * factor,
            ..self.clone()
        }
    }
}

/// Exact `#{n ≤ N : ∥nα − γ∥ < ε}` by enumeration.
pub fn bohr_count(q: &BohrQuery) -> Result<u64> {
    q.validate()?;
    let orbit = CircleOrbit::new(&q.alpha, &q.gamma, q.precision)?;
    let eps = Threshold::from_rational(&q.eps)?;
    let mut count = 0;
    for n in 1..=q.n {
        if orbit.dist_lt(n, &eps)? {
            count += 1;
        }
    }
    Ok(count)
}

/// The bracket `(⌊M⌋, 32M)` with the index `K` used to build it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BohrBracket {
    pub lower: u64,
    /// `32M` as an exact rational.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub upper: BigRational,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub m: BigRational,
    /// Index with `q_K ≤ N < q_{K+1}`.
    pub k: usize,
    pub q_k: u64,
    pub q_k_next: u64,
}

impl BohrBracket {
    /// `true` when `lower ≤ count ≤ upper` (exact).
    pub fn contains(&self, count: u64) -> bool {
        count >= self.lower && BigRational::from_integer(count.into()) <= self.upper
    }
}

/// `(⌊M⌋, 32M)` for `M = max(εN, min(ε q_{K+1}, N/(2q_K)))`, `q_K ≤ N < q_{K+1}`.
///
/// Requires `1/N < 2ε < ∥q₂α∥`; a violation names the failing side.
pub fn bohr_bracket(q: &BohrQuery) -> Result<BohrBracket> {
    q.validate()?;
    let two_eps = &q.eps * BigRational::from_integer(2.into());
    let inv_n = BigRational::new(BigInt::one(), BigInt::from(q.n));
    if two_eps <= inv_n {
        return Err(Error::Precondition(format!(
            "left side fails: 1/N < 2ε requires 2ε > 1/{} but 2ε = {}",
            q.n, two_eps
        )));
    }
    let cf = continued_fraction(&q.alpha, Some(2))?;
    let q2 = cf.q(2).ok_or_else(|| {
        Error::Precondition("α needs at least two partial quotients".into())
    })?;
    let q2 = q2
        .to_u64()
        .ok_or_else(|| Error::Precondition("q₂ exceeds 64 bits".into()))?;
    let right_ok = match q.alpha.as_rational() {
        Some(a) => {
            let t = a * BigRational::from_integer(q2.into());
            let f = &t - t.floor();
            let one = BigRational::one();
            let dist = if f.clone() * BigRational::from_integer(2.into()) <= one { f } else { one - f };
            two_eps < dist
        }
        None => {
            let orbit = CircleOrbit::new(&q.alpha, &Real::integer(0), q.precision)?;
            let t = Threshold::from_rational(&two_eps)?;
            // irrational α: ∥q₂α∥ ≠ 2ε, so "not below" means strictly above
            !orbit.dist_lt(q2, &t)?
        }
    };
    if !right_ok {
        return Err(Error::Precondition(format!(
            "right side fails: 2ε = {} is not below ∥q₂α∥ (q₂ = {q2})",
            two_eps
        )));
    }
    let cf = expand_past(&q.alpha, &BigUint::from(q.n))?;
    let nb = BigUint::from(q.n);
    // K with q_K ≤ N < q_{K+1}; q₀ = 1 ≤ N always.
    let mut k = 0usize;
    while let Some(next) = cf.q(k as i64 + 1) {
        if next <= nb {
            k += 1;
        } else {
            break;
        }
    }
    let q_k = cf.q(k as i64).expect("q_K computed");
    let q_k1 = cf.q(k as i64 + 1).ok_or_else(|| {
        Error::Precondition("α is rational with denominator ≤ N; q_{K+1} undefined".into())
    })?;
    let n_rat = BigRational::from_integer(q.n.into());
    let a = &q.eps * &n_rat;
    let b1 = &q.eps * BigRational::from_integer(BigInt::from(q_k1.clone()));
    let b2 = &n_rat / BigRational::from_integer(BigInt::from(q_k.clone() * 2u32));
    let inner = if b1 < b2 { b1 } else { b2 };
    let m = if a > inner { a } else { inner };
    let lower = m.floor().to_integer().to_u64().unwrap_or(u64::MAX);
    Ok(BohrBracket {
        lower,
        upper: &m * BigRational::from_integer(32.into()),
        m,
        k,
        q_k: q_k.to_u64().unwrap_or(u64::MAX),
        q_k_next: q_k1.to_u64().unwrap_or(u64::MAX),
    })
}

/// Calibration of the annulus estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusCalibration {
    pub c1: f64,
    pub c2: f64,
    /// Explicit `K(α, b)`; defaults to `10·b·max partial quotient`.
    pub k_override: Option<f64>,
    /// Continued-fraction depth inspected for the badly-approximable proxy.
    pub depth: usize,
    /// Partial-quotient cap for the badly-approximable proxy.
    pub quotient_cap: u64,
}

impl Default for AnnulusCalibration {
    fn default() -> Self {
        Self {
            c1: 0.25,
            c2: 65.0,
            k_override: None,
            depth: 40,
            quotient_cap: 1000,
        }
    }
}

/// Result of [`annulus_count`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusReport {
    pub count: u64,
    /// `count / (N ε)`.
    pub ratio: f64,
    pub within_bounds: bool,
    pub k_alpha_b: f64,
    /// `ε ≥ K(α,b)/N` holds.
    pub scale_ok: bool,
    /// Partial quotients bounded by the cap over the inspected depth.
    pub badly_approximable_proxy: bool,
    /// Both hypotheses hold.
    pub preconditions_met: bool,
}

/// Exact `#{n ≤ N : ε/b ≤ ∥nα − γ∥ < ε}` with the normalised ratio `count/(Nε)`.
pub fn annulus_count(q: &BohrQuery, cal: &AnnulusCalibration) -> Result<AnnulusReport> {
    q.validate()?;
    if q.b < 300 {
        return Err(Error::Precondition(format!("annulus ratio b = {} must be ≥ 300", q.b)));
    }
    let cf = continued_fraction(&q.alpha, Some(cal.depth))?;
    let bad = !cf.terminated && cf.bounded_by(cal.quotient_cap);
    let max_a = cf.max_partial_quotient().to_f64().unwrap_or(f64::INFINITY);
    let k_ab = cal.k_override.unwrap_or(10.0 * q.b as f64 * max_a);
    let eps_f = q.eps.to_f64().unwrap_or(f64::INFINITY);
    let scale_ok = eps_f * q.n as f64 >= k_ab;
    let outer = Threshold::from_rational(&q.eps)?;
    let inner = Threshold::from_rational(&(&q.eps / BigRational::from_integer(q.b.into())))?;
    let orbit = CircleOrbit::new(&q.alpha, &q.gamma, q.precision)?;
    let mut count = 0u64;
    for n in 1..=q.n {
        if orbit.dist_lt(n, &outer)? && orbit.dist_ge(n, &inner)? {
            count += 1;
        }
    }
    let ratio = count as f64 / (q.n as f64 * eps_f);
    Ok(AnnulusReport {
        count,
        ratio,
        within_bounds: ratio >= cal.c1 && ratio <= cal.c2,
        k_alpha_b: k_ab,
        scale_ok,
        badly_approximable_proxy: bad,
        preconditions_met: bad && scale_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_alpha_counts_even_indices() {
        let q = BohrQuery::new(Real::ratio(1, 2), Real::integer(0), 10, rat(1, 10));
        assert_eq!(bohr_count(&q).unwrap(), 5);
    }

    #[test]
    fn wide_radius_counts_everything() {
        let q = BohrQuery::new(Real::golden(), Real::ratio(3, 10), 50, rat(3, 5));
        assert_eq!(bohr_count(&q).unwrap(), 50);
        // ε = 1/2 excludes only exact half-integers, which an irrational orbit never hits
        let q = BohrQuery::new(Real::golden(), Real::integer(0), 50, rat(1, 2));
        assert_eq!(bohr_count(&q).unwrap(), 50);
    }

    #[test]
    fn golden_bracket_example() {
        let q = BohrQuery::new(Real::golden(), Real::integer(0), 100, rat(1, 20));
        let br = bohr_bracket(&q).unwrap();
        assert_eq!(br.lower, 5);
        assert_eq!(br.upper, BigRational::from_integer(160.into()));
        assert_eq!((br.q_k, br.q_k_next), (89, 144));
        let c = bohr_count(&q).unwrap();
        assert!(br.contains(c), "count {c}");
    }

    #[test]
    fn silver_bracket_example() {
        let q = BohrQuery::new(Real::silver(), Real::integer(0), 70, rat(1, 50));
        let br = bohr_bracket(&q).unwrap();
        let c = bohr_count(&q).unwrap();
        assert!(br.contains(c), "count {c}, bracket {br:?}");
    }

    #[test]
    fn boundary_radius_is_rejected() {
        let q = BohrQuery::new(Real::golden(), Real::integer(0), 100, rat(1, 100));
        assert!(bohr_bracket(&q).is_ok()); // 2ε = 2/N > 1/N
        let q = BohrQuery::new(Real::golden(), Real::integer(0), 100, rat(1, 200));
        let err = bohr_bracket(&q).unwrap_err().to_string();
        assert!(err.contains("left side"), "{err}");
        let q = BohrQuery::new(Real::golden(), Real::integer(0), 100, rat(1, 5));
        let err = bohr_bracket(&q).unwrap_err().to_string();
        assert!(err.contains("right side"), "{err}");
    }

    #[test]
    fn annulus_example_and_gates() {
        let mut q = BohrQuery::new(Real::golden(), Real::ratio(3, 10), 10_000, rat(1, 100));
        q.b = 300;
        let rep = annulus_count(&q, &AnnulusCalibration::default()).unwrap();
        assert!(rep.within_bounds, "{rep:?}");
        assert!(rep.badly_approximable_proxy);
        assert!(!rep.scale_ok, "Nε = 100 is below the default K(α,b) = 3000");
        q.b = 299;
        assert!(annulus_count(&q, &AnnulusCalibration::default()).is_err());
    }

    #[test]
    fn annulus_is_empty_for_huge_radius() {
        let mut q = BohrQuery::new(Real::golden(), Real::integer(0), 500, rat(200, 1));
        q.b = 300;
        assert_eq!(annulus_count(&q, &AnnulusCalibration::default()).unwrap().count, 0);
    }
}
