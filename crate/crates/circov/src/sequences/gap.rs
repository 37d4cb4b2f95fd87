//! Growth diagnostics for a generated prefix.
//!
//! For each `n`, `Φ(n) = 1/(q_{n+1}/q_n − 1)` measures how close the sequence
//! is to a Hadamard gap sequence: `Φ` bounded means lacunary, slowly growing
//! `Φ` means sub-lacunary, and `Φ(n) ≍ n` is the polynomial regime.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::spec::Term;
use crate::error::{Error, Result};

/// Thresholds for the flags of [`gap_profile`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapThresholds {
    /// `ε` in the condition `q_{n+1}/q_n > 1 + 1/n^{1−ε}`.
    pub eps: f64,
    /// Fitted exponents of `Φ` at most this count as `n^{o(1)}`.
    pub subpolynomial_exponent: f64,
    /// Fitted exponents of `Φ` at most this count as bounded (lacunary).
    pub bounded_exponent: f64,
}

impl Default for GapThresholds {
    fn default() -> Self {
        GapThresholds {
            eps: 0.5,
            subpolynomial_exponent: 0.1,
            bounded_exponent: 0.05,
        }
    }
}

/// Per-index ratios, `Φ`, and hypothesis flags.
#[derive(Debug, Clone, Serialize)]
pub struct GapProfile {
    /// `q_{n+1}/q_n − 1` for `n = 1 … N−1`.
    pub excess: Vec<f64>,
    /// `Φ(n) = 1/(q_{n+1}/q_n − 1)`.
    pub phi: Vec<f64>,
    /// `min_n (q_{n+1}/q_n − 1)·n^{1−ε}` over the whole prefix.
    pub min_scaled_gap: f64,
    /// The same minimum over the upper half of the prefix.
    pub tail_min_scaled_gap: f64,
    /// Least-squares slope of `ln Φ(n)` against `ln n` over the upper half of the prefix.
    pub phi_exponent: f64,
    /// `min_n q_{n+1}/q_n`.
    pub min_ratio: f64,
    /// Bounded `Φ` (Hadamard gap) on the prefix.
    pub lacunary: bool,
    /// `q_{n+1}/q_n > 1 + 1/n^{1−ε}` for every `n` in the upper half of the prefix.
    ///
    /// The condition is asymptotic, so small `n` are not held against it
    /// (`2ⁿ` fails it at `n = 1` only).
    pub gap_condition: bool,
    /// Fitted `Φ` growth consistent with `n^{o(1)}`.
    pub phi_subpolynomial: bool,
    pub thresholds: GapThresholds,
}

/// Excess `q_{n+1}/q_n − 1` computed exactly for integers, from logarithms otherwise.
fn excess(a: &Term, b: &Term) -> f64 {
    match (a.to_biguint(), b.to_biguint()) {
        (Some(x), Some(y)) if x.bits() < 4096 && y.bits() < 4096 => {
            let diff = num_bigint::BigInt::from(y) - num_bigint::BigInt::from(x.clone());
            BigRational::new(diff, num_bigint::BigInt::from(x))
                .to_f64()
                .unwrap_or(f64::INFINITY)
        }
        _ => (b.ln() - a.ln()).exp_m1(),
    }
}

/// Gap diagnostics for the prefix `terms` (at least two terms).
pub fn gap_profile(terms: &[Term], thresholds: GapThresholds) -> Result<GapProfile> {
    if terms.len() < 2 {
        return Err(Error::InvalidInput("gap profile needs at least two terms".into()));
    }
    let excess: Vec<f64> = terms.windows(2).map(|w| excess(&w[0], &w[1])).collect();
    let phi: Vec<f64> = excess.iter().map(|e| 1.0 / e).collect();
    let scaled: Vec<f64> = excess
        .iter()
        .enumerate()
        .map(|(i, e)| e * ((i + 1) as f64).powf(1.0 - thresholds.eps))
        .collect();
    let half = phi.len() / 2;
    let min_scaled_gap = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_min_scaled_gap = scaled[half..].iter().copied().fold(f64::INFINITY, f64::min);
    let (xs, ys): (Vec<f64>, Vec<f64>) = phi
        .iter()
        .enumerate()
        .skip(half)
        .filter(|(_, p)| p.is_finite() && **p > 0.0)
        .map(|(i, p)| (((i + 1) as f64).ln(), p.ln()))
        .unzip();
    let phi_exponent = least_squares(&xs, &ys).map_or(0.0, |(slope, _, _)| slope);
    let min_ratio = excess.iter().fold(f64::INFINITY, |m, e| m.min(1.0 + e));
    Ok(GapProfile {
        min_scaled_gap,
        tail_min_scaled_gap,
        phi_exponent,
        min_ratio,
        lacunary: phi_exponent <= thresholds.bounded_exponent && min_ratio > 1.0,
        gap_condition: tail_min_scaled_gap > 1.0,
        phi_subpolynomial: phi_exponent <= thresholds.subpolynomial_exponent,
        excess,
        phi,
        thresholds,
    })
}

/// Ordinary least squares `y ≈ slope·x + intercept`; returns `(slope, intercept, rms residual)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Some((slope, intercept, (rss / n as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::spec::{generate, SequenceSpec};

    #[test]
    fn powers_of_two_satisfy_everything() {
        let terms = generate(&SequenceSpec::powers_of_two(), 200, 64).unwrap();
        let g = gap_profile(&terms, GapThresholds::default()).unwrap();
        assert!(g.excess.iter().all(|&e| e == 1.0));
        assert!(g.lacunary && g.gap_condition && g.phi_subpolynomial);
    }

    #[test]
    fn exp_sqrt_is_flagged() {
        let terms = generate(&"exp:1/2".parse().unwrap(), 2000, 128).unwrap();
        let g = gap_profile(&terms, GapThresholds::default()).unwrap();
        // Φ(n) ≈ 2√n
        assert!((g.phi[999] / (2.0 * 1000f64.sqrt()) - 1.0).abs() < 0.01);
        assert!((g.phi_exponent - 0.5).abs() < 0.02);
        assert!(!g.phi_subpolynomial);
        assert!(!g.lacunary);
    }

    #[test]
    fn identity_sequence_fails_both() {
        let terms = generate(&SequenceSpec::monomial(1), 500, 64).unwrap();
        let g = gap_profile(&terms, GapThresholds::default()).unwrap();
        assert!((g.phi[9] - 10.0).abs() < 1e-12);
        assert!(!g.gap_condition);
        assert!(!g.phi_subpolynomial);
    }

    #[test]
    fn regression_recovers_a_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [3.0, 5.0, 7.0, 9.0];
        let (s, c, r) = least_squares(&xs, &ys).unwrap();
        assert!((s - 2.0).abs() < 1e-12 && (c - 1.0).abs() < 1e-12 && r < 1e-12);
    }
}
