//! The covering series `Σ n⁻² exp(ℓ₁ + ⋯ + ℓ_n)`: its terms and a verdict
//! on divergence.
//!
//! For nonincreasing lengths the circle is covered almost surely by the
//! random arcs exactly when this series diverges. Two classifiers are
//! provided:
//!
//! * a closed form for the recognised families — `c/n` diverges iff `c ≥ 1`;
//!   `1/n − 1/(n (ln n)^p)` diverges iff `p ≥ 1`, because then
//!   `t_n ≍ n⁻¹ exp(−(ln n)^{1−p}/(1−p))` (or `1/(n ln n)` at `p = 1`);
//! * a numeric fit of `t_n ≈ c·n^{−s}` over the last two decades of `n`, with
//!   `s ≤ 1.02` read as divergence, `s ≥ 1.2` as convergence, and anything
//!   in between left inconclusive.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::lengths::LengthSequence;
use crate::arith::psi::Neumaier;
use crate::sequences::gap::least_squares;

/// Outcome of a divergence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SheppVerdict {
    Diverges,
    Converges,
    Inconclusive,
}

impl std::fmt::Display for SheppVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SheppVerdict::Diverges => "DIVERGES",
            SheppVerdict::Converges => "CONVERGES",
            SheppVerdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Exponent at or below which the fitted decay counts as divergent.
pub const DIVERGENT_EXPONENT: f64 = 1.02;
/// Exponent at or above which the fitted decay counts as convergent.
pub const CONVERGENT_EXPONENT: f64 = 1.2;
/// Number of log-spaced sample points kept in a report.
const SAMPLES: usize = 200;

/// Terms of the covering series and both verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct SheppReport {
    pub n: u64,
    /// `(n, ln t_n)` at log-spaced sample indices (always including `N`).
    pub log_terms: Vec<(u64, f64)>,
    /// Fitted decay exponent `s`, if at least two sample points were available.
    pub fitted_exponent: Option<f64>,
    pub numeric: SheppVerdict,
    /// Verdict from the closed form, for recognised families.
    pub closed_form: Option<SheppVerdict>,
}

impl SheppReport {
    /// The closed-form verdict when available, else the numeric one.
    pub fn verdict(&self) -> SheppVerdict {
        self.closed_form.unwrap_or(self.numeric)
    }

    /// `false` only if both verdicts are decisive and disagree.
    pub fn consistent(&self) -> bool {
        match (self.closed_form, self.numeric) {
            (Some(c), n) if n != SheppVerdict::Inconclusive => c == n,
            _ => true,
        }
    }
}

/// Closed-form divergence verdict for the recognised families.
pub fn closed_form_verdict(lengths: &LengthSequence) -> Option<SheppVerdict> {
    match lengths {
        LengthSequence::Harmonic { c } => Some(if *c >= BigRational::from_integer(BigInt::from(1)) {
            SheppVerdict::Diverges
        } else {
            SheppVerdict::Converges
        }),
        LengthSequence::LogCorrected { p, .. } => Some(if *p >= 1.0 {
            SheppVerdict::Diverges
        } else {
            SheppVerdict::Converges
        }),
        _ => None,
    }
}

/// Numeric verdict for a fitted exponent.
pub fn numeric_verdict(exponent: Option<f64>) -> SheppVerdict {
    match exponent {
        Some(s) if s <= DIVERGENT_EXPONENT => SheppVerdict::Diverges,
        Some(s) if s >= CONVERGENT_EXPONENT => SheppVerdict::Converges,
        _ => SheppVerdict::Inconclusive,
    }
}

/// Computes `ln t_n = ℓ₁ + ⋯ + ℓ_n − 2 ln n` for `n ≤ N` and classifies the series.
pub fn shepp_terms(lengths: &LengthSequence, n: u64) -> SheppReport {
    let n = n.max(1);
    let ratio = (n as f64).powf(1.0 / SAMPLES as f64).max(1.0 + 1e-12);
    let mut next_sample = 1.0f64;
    let mut partial = Neumaier::default();
    let mut log_terms = Vec::with_capacity(SAMPLES + 2);
    for k in 1..=n {
        partial.add(lengths.value(k));
        if k as f64 >= next_sample || k == n {
            log_terms.push((k, partial.sum() - 2.0 * (k as f64).ln()));
            while next_sample <= k as f64 {
                next_sample *= ratio;
            }
        }
    }
    let lower = (n / 100).max(1);
    let (xs, ys): (Vec<f64>, Vec<f64>) = log_terms
        .iter()
        .filter(|(k, _)| *k >= lower)
        .map(|&(k, lt)| ((k as f64).ln(), lt))
        .unzip();
    let fitted_exponent = least_squares(&xs, &ys).map(|(slope, _, _)| -slope);
    SheppReport {
        n,
        log_terms,
        fitted_exponent,
        numeric: numeric_verdict(fitted_exponent),
        closed_form: closed_form_verdict(lengths),
    }
}
