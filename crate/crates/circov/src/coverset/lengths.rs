//! Arc-length rules `n ↦ ℓ_n ∈ [0, 1]`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::arcset::{length_to_fixed, TURN};
use crate::arith::{CircleOrbit, Psi};
use crate::error::{Error, Result};

/// The family a [`LengthSequence`] belongs to.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LengthSequence {
    /// `ℓ_n = min(1, c/n)` with rational `c`.
    Harmonic {
        #[serde(serialize_with = "crate::report::ser_rational")]
        c: BigRational,
    },
    /// `ℓ_n = 1/n − 1/(n (ln n)^p)` for `n ≥ start`, held at `ℓ_start` below.
    ///
    /// The formula increases for small `n` before it decays; `start` is the
    /// integer where it peaks, so the held sequence is nonincreasing.
    LogCorrected { p: f64, start: u64 },
    /// `ℓ_n = min(1, ψ(n) / ∥nα − γ∥)` (not monotone).
    PsiDriven {
        psi: Psi,
        #[serde(skip)]
        orbit: CircleOrbit,
    },
    /// Explicit lengths; `ℓ_n = 0` past the end.
    Explicit { lengths: Vec<f64> },
}

fn log_corrected_formula(p: f64, n: u64) -> f64 {
    let m = n as f64;
    (1.0 / m - 1.0 / (m * m.ln().powf(p))).clamp(0.0, 1.0)
}

/// First `n ≥ 3` after which `1/n − 1/(n (ln n)^p)` never increases.
fn log_corrected_peak(p: f64) -> u64 {
    let mut n = 3u64;
    while log_corrected_formula(p, n + 1) > log_corrected_formula(p, n) {
        n += 1;
    }
    n
}

impl LengthSequence {
    /// `c/n` from a decimal or fraction string such as `0.9` or `3/2`.
    pub fn harmonic(c: &str) -> Result<Self> {
        let c = crate::arith::real::parse_rational(c)?;
        if c < BigRational::zero() {
            return Err(Error::InvalidInput("harmonic scale must be nonnegative".into()));
        }
        Ok(LengthSequence::Harmonic { c })
    }

    /// `1/n − 1/(n (ln n)^p)`.
    pub fn log_corrected(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidInput("log-corrected exponent must be positive".into()));
        }
        Ok(LengthSequence::LogCorrected {
            p,
            start: log_corrected_peak(p),
        })
    }

    /// Explicit lengths, each in `[0, 1]`.
    pub fn explicit(lengths: Vec<f64>) -> Result<Self> {
        if lengths.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::InvalidInput("explicit lengths must lie in [0, 1]".into()));
        }
        Ok(LengthSequence::Explicit { lengths })
    }

    /// Parses `harmonic:c`, `logcorr:p`, or `list:l1,l2,…`.
    pub fn parse(s: &str) -> Result<Self> {
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        match head.trim() {
            "harmonic" => Self::harmonic(rest),
            "logcorr" => Self::log_corrected(
                rest.trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad exponent in {s:?}")))?,
            ),
            "list" => Self::explicit(
                rest.split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::InvalidInput(format!("bad length list {s:?}")))?,
            ),
            _ => Err(Error::InvalidInput(format!(
                "unknown length family {s:?} (expected harmonic:c, logcorr:p or list:…)"
            ))),
        }
    }

    /// `true` when the family is nonincreasing by construction.
    pub fn claims_monotone(&self) -> bool {
        matches!(self, LengthSequence::Harmonic { .. } | LengthSequence::LogCorrected { .. })
    }

    /// `ℓ_n` as a float (`n ≥ 1`).
    pub fn value(&self, n: u64) -> f64 {
        match self {
            LengthSequence::Harmonic { c } => {
                (c.to_f64().unwrap_or(f64::INFINITY) / n as f64).min(1.0)
            }
            LengthSequence::LogCorrected { p, start } => log_corrected_formula(*p, n.max(*start)),
            LengthSequence::PsiDriven { psi, orbit } => {
                let d = orbit.dist_f64(n);
                let v = psi.value(n);
                if d <= 0.0 {
                    if v > 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (v / d).min(1.0)
                }
            }
            LengthSequence::Explicit { lengths } => {
                lengths.get(n as usize - 1).copied().unwrap_or(0.0)
            }
        }
    }

    /// Exact `ℓ_n` when the family is rational.
    pub fn exact_value(&self, n: u64) -> Option<BigRational> {
        match self {
            LengthSequence::Harmonic { c } => {
                let v = c / BigRational::from_integer(BigInt::from(n));
                Some(if v > BigRational::one() { BigRational::one() } else { v })
            }
            LengthSequence::Explicit { lengths } => Some(
                lengths
                    .get(n as usize - 1)
                    .map(|&l| BigRational::from_float(l).expect("finite length"))
                    .unwrap_or_else(BigRational::zero),
            ),
            _ => None,
        }
    }

    /// `ℓ_n` in fixed-point units of `2^-64`.
    ///
    /// Rational families are rounded exactly to nearest; the others go
    /// through the float value.
    pub fn fixed(&self, n: u64) -> u128 {
        match self {
            LengthSequence::Harmonic { c } => {
                // round(c·2^64/n) computed in integers
                let num = c.numer() << 64usize;
                let den = c.denom() * BigInt::from(n);
                let q: BigInt = (num * 2 + &den) / (den * 2);
                q.to_u128().unwrap_or(TURN).min(TURN)
            }
            _ => length_to_fixed(self.value(n)),
        }
    }

    /// Checks `ℓ_n ≥ ℓ_{n+1}` on a geometric grid up to `n_max`.
    pub fn spot_check_monotone(&self, n_max: u64) -> bool {
        let mut n = 1u64;
        while n < n_max {
            if self.value(n) < self.value(n + 1) {
                return false;
            }
            n = (n + 1).max(n + n / 8);
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values_and_fixed_point() {
        let l = LengthSequence::harmonic("1/2").unwrap();
        assert_eq!(l.fixed(1), TURN / 2);
        assert_eq!(l.fixed(4), TURN / 8);
        assert_eq!(l.exact_value(2), Some(BigRational::new(1.into(), 4.into())));
        let big = LengthSequence::harmonic("3").unwrap();
        assert_eq!(big.fixed(2), TURN);
        assert_eq!(big.value(2), 1.0);
    }

    #[test]
    fn log_corrected_is_monotone_and_in_range() {
        for p in [0.5, 1.0, 2.0] {
            let l = LengthSequence::log_corrected(p).unwrap();
            assert!(l.spot_check_monotone(1 << 20), "p = {p}");
            assert!((0.0..=1.0).contains(&l.value(1)));
            assert_eq!(l.value(1), l.value(3));
            assert!(l.value(1) > 0.0);
        }
    }

    #[test]
    fn parse_round_trip() {
        assert!(matches!(LengthSequence::parse("harmonic:0.9").unwrap(), LengthSequence::Harmonic { .. }));
        assert!(matches!(LengthSequence::parse("logcorr:1").unwrap(), LengthSequence::LogCorrected { .. }));
        let l = LengthSequence::parse("list:0.5,0.25").unwrap();
        assert_eq!(l.value(2), 0.25);
        assert_eq!(l.value(3), 0.0);
        assert!(LengthSequence::parse("list:2").is_err());
        assert!(LengthSequence::parse("nope").is_err());
    }
}
