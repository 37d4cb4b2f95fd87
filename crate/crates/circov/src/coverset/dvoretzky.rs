//! Random covering by arcs with i.i.d. uniform centres.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::arcset::{Arc, ArcSet};
use super::lengths::LengthSequence;
use crate::arith::psi::Neumaier;
use crate::rng::trial_rng;

/// Result of one covering trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverTrial {
    /// Points not covered by any of the first `N` arcs.
    pub uncovered: ArcSet,
    /// Uncovered measure after each arc, when recording was requested.
    pub step_measures: Option<Vec<f64>>,
}

/// One CSV-ready row per trial.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub n: u64,
    pub uncovered_measure: f64,
    pub components: usize,
}

/// Drops arcs centred at i.i.d. uniform points `X₁ … X_N` and returns the
/// uncovered set.
///
/// Centres are drawn as exact 64-bit dyadic points, so the whole trial is
/// a deterministic function of the RNG state.
pub fn dvoretzky_trial<R: Rng + ?Sized>(
    lengths: &LengthSequence,
    n: u64,
    rng: &mut R,
    record_steps: bool,
) -> CoverTrial {
    let mut uncovered = ArcSet::full();
    let mut steps = record_steps.then(|| Vec::with_capacity(n as usize));
    for k in 1..=n {
        let center: u64 = rng.random();
        if !uncovered.is_empty() {
            uncovered.subtract_arc(&Arc::new(center, lengths.fixed(k)));
        }
        if let Some(s) = steps.as_mut() {
            s.push(uncovered.measure_f64());
        }
    }
    CoverTrial {
        uncovered,
        step_measures: steps,
    }
}

/// `∏_{n≤N}(1 − ℓ_n)`, exactly for rational families.
#[derive(Debug, Clone, Serialize)]
pub struct ExpectedUncovered {
    pub n: u64,
    /// Natural logarithm of the product (−∞ when some factor vanishes).
    pub ln_value: f64,
    /// The product as a float.
    pub value: f64,
    /// Exact rational value, when every length is rational.
    #[serde(serialize_with = "ser_opt_rational")]
    pub exact: Option<BigRational>,
}

fn ser_opt_rational<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => crate::report::ser_rational(r, s),
        None => s.serialize_none(),
    }
}

/// Expected uncovered measure after `N` arcs (linearity of expectation).
pub fn expected_uncovered(lengths: &LengthSequence, n: u64) -> ExpectedUncovered {
    let mut ln_sum = Neumaier::default();
    let mut vanished = false;
    for k in 1..=n {
        let l = lengths.value(k);
        if l >= 1.0 {
            vanished = true;
            break;
        }
        ln_sum.add((-l).ln_1p());
    }
    let exact = exact_product(lengths, n);
    let ln_value = if vanished { f64::NEG_INFINITY } else { ln_sum.sum() };
    let value = match &exact {
        Some(r) => r.to_f64().unwrap_or_else(|| ln_value.exp()),
        None => ln_value.exp(),
    };
    ExpectedUncovered {
        n,
        ln_value,
        value,
        exact,
    }
}

fn exact_product(lengths: &LengthSequence, n: u64) -> Option<BigRational> {
    lengths.exact_value(1)?;
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for k in 1..=n {
        let l = lengths.exact_value(k)?;
        let f = BigRational::one() - l;
        if f.is_zero() {
            return Some(BigRational::zero());
        }
        num *= f.numer();
        den *= f.denom();
    }
    Some(BigRational::new(num, den))
}

/// Monte Carlo summary of the final uncovered measure.
#[derive(Debug, Clone, Serialize)]
pub struct CoverSummary {
    pub n: u64,
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
    pub expected: f64,
    /// `(mean − expected) / std_error` (0 when both agree exactly).
    pub z_score: f64,
    pub rows: Vec<TrialRow>,
}

/// Runs `trials` independent trials in parallel; trial `t` uses the stream
/// derived from `(seed, t)`, so the result does not depend on scheduling.
pub fn monte_carlo_uncovered(lengths: &LengthSequence, n: u64, trials: u64, seed: u64) -> CoverSummary {
    let rows: Vec<TrialRow> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let out = dvoretzky_trial(lengths, n, &mut rng, false);
            TrialRow {
                trial: t,
                n,
                uncovered_measure: out.uncovered.measure_f64(),
                components: out.uncovered.components(),
            }
        })
        .collect();
    let mut sum = Neumaier::default();
    let mut sq = Neumaier::default();
    for r in &rows {
        sum.add(r.uncovered_measure);
        sq.add(r.uncovered_measure * r.uncovered_measure);
    }
    let t = trials.max(1) as f64;
    let mean = sum.sum() / t;
    let var = if trials > 1 {
        ((sq.sum() - t * mean * mean) / (t - 1.0)).max(0.0)
    } else {
        0.0
    };
    let std_error = (var / t).sqrt();
    let expected = expected_uncovered(lengths, n).value;
    let diff = mean - expected;
    let z_score = if std_error > 0.0 {
        diff / std_error
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    };
    CoverSummary {
        n,
        trials,
        mean,
        std_error,
        expected,
        z_score,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_arcs_leave_everything() {
        let l = LengthSequence::harmonic("1/2").unwrap();
        let out = dvoretzky_trial(&l, 0, &mut trial_rng(1, 0), true);
        assert_eq!(out.uncovered.measure_f64(), 1.0);
        assert_eq!(out.step_measures.unwrap().len(), 0);
    }

    #[test]
    fn unit_first_arc_covers() {
        let l = LengthSequence::harmonic("1").unwrap();
        let out = dvoretzky_trial(&l, 1, &mut trial_rng(1, 0), true);
        assert!(out.uncovered.is_empty());
        assert_eq!(out.step_measures.unwrap(), vec![0.0]);
    }

    #[test]
    fn trials_are_reproducible() {
        let l = LengthSequence::harmonic("1/2").unwrap();
        let a = dvoretzky_trial(&l, 500, &mut trial_rng(9, 3), true);
        let b = dvoretzky_trial(&l, 500, &mut trial_rng(9, 3), true);
        assert_eq!(a, b);
        let c = dvoretzky_trial(&l, 500, &mut trial_rng(9, 4), false);
        assert_ne!(a.uncovered, c.uncovered);
    }

    #[test]
    fn step_measures_are_nonincreasing() {
        let l = LengthSequence::log_corrected(1.0).unwrap();
        let out = dvoretzky_trial(&l, 2000, &mut trial_rng(5, 0), true);
        let s = out.step_measures.unwrap();
        assert!(s.windows(2).all(|w| w[1] <= w[0]));
        assert!(out.uncovered.check_invariants());
    }

    #[test]
    fn expected_products() {
        let zero = LengthSequence::explicit(vec![]).unwrap();
        assert_eq!(expected_uncovered(&zero, 5).exact, Some(BigRational::one()));
        let h = LengthSequence::harmonic("1").unwrap();
        let e = expected_uncovered(&h, 10);
        assert_eq!(e.exact, Some(BigRational::zero()));
        assert_eq!(e.value, 0.0);
        let half = LengthSequence::harmonic("1/2").unwrap();
        let e = expected_uncovered(&half, 4);
        assert_eq!(e.exact, Some(BigRational::new(105.into(), 384.into())));
        assert!((e.ln_value.exp() - 105.0 / 384.0).abs() < 1e-15);
    }

    #[test]
    fn small_monte_carlo_matches_expectation() {
        let l = LengthSequence::harmonic("1/2").unwrap();
        let s = monte_carlo_uncovered(&l, 200, 2000, 42);
        assert!(s.z_score.abs() < 4.0, "{s:?}");
    }
}
