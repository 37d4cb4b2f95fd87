//! The gcd-sum hypothesis for integer sequences.
//!
//! For an index set `𝕀 = {n_k}` the quantity
//!
//! ```text
//! S(N) = Σ_{N<k≤m≤2N} min[ gcd(a_m, a_k)/a_m · min(ln(a_m/a_k), ln ln N), N^{1−ν−εν} ]
//! ```
//!
//! with `a_k = q_{n_k}` is compared with `N^{2−ν}/(ψ(N)·f(N)^ν)`. Because `ψ`
//! may grow arbitrarily slowly, the verdict is based on the trend of the
//! normalised ratio across several `N`, not on one value.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::arithmetic::{is_prime, primes_up_to};
use super::spec::{Sequence, SequenceSpec, Term};
use crate::arith::psi::Neumaier;
use crate::error::{Error, Result};

/// Slowly varying functions used for `f` and `ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum SlowFunction {
    Constant(f64),
    /// `ln N`.
    Log,
    /// `(ln N)^a`.
    LogPower(f64),
    /// `ln ln N`.
    LogLog,
}

impl SlowFunction {
    pub fn value(&self, n: f64) -> f64 {
        match self {
            SlowFunction::Constant(c) => *c,
            SlowFunction::Log => n.ln(),
            SlowFunction::LogPower(a) => n.ln().powf(*a),
            SlowFunction::LogLog => n.ln().ln(),
        }
    }

    /// Largest `f(2x)/f(x)` over `x = 2^k`, `k ∈ [k₀, k₁]`.
    pub fn doubling_constant(&self, k0: u32, k1: u32) -> f64 {
        (k0..=k1)
            .map(|k| {
                let x = (k as f64).exp2();
                self.value(2.0 * x) / self.value(x)
            })
            .fold(0.0, f64::max)
    }
}

/// Which indices `n_k` enter the sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexRule {
    /// `n_k = k`.
    All,
    /// `n_k = p_k`, the `k`-th prime.
    Primes,
}

/// Parameters of the hypothesis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GcdSumHypothesis {
    pub nu: f64,
    pub eps: f64,
    pub f: SlowFunction,
    pub psi: SlowFunction,
    pub index_rule: IndexRule,
    /// Accepted band for `#(𝕀 ∩ [N])·f(N)/N`.
    pub density_band: (f64, f64),
    /// A trend passes when every ratio is at most `trend_band` times the first.
    pub trend_band: f64,
}

impl GcdSumHypothesis {
    /// Defaults for a given `ν`: `ε = 0.1`, `f ≡ 1`, `ψ ≡ 1`, all indices.
    pub fn new(nu: f64) -> Self {
        GcdSumHypothesis {
            nu,
            eps: 0.1,
            f: SlowFunction::Constant(1.0),
            psi: SlowFunction::Constant(1.0),
            index_rule: IndexRule::All,
            density_band: (0.25, 4.0),
            trend_band: 2.0,
        }
    }

    /// Index rule and `f` paired as for monomials: primes as indices, `f = ln`.
    pub fn for_spec(spec: &SequenceSpec, nu: f64) -> Self {
        let mut h = Self::new(nu);
        if let SequenceSpec::Polynomial { .. } = spec {
            h.index_rule = IndexRule::Primes;
            h.f = SlowFunction::Log;
        }
        h
    }

    fn validate(&self) -> Result<()> {
        if !(self.nu >= 1.0) || !(self.eps > 0.0) {
            return Err(Error::InvalidInput("the gcd-sum hypothesis needs ν ≥ 1 and ε > 0".into()));
        }
        Ok(())
    }

    /// Largest sequence index touched for window `N`.
    fn max_index(&self, n: u64) -> u64 {
        match self.index_rule {
            IndexRule::All => 2 * n,
            IndexRule::Primes => *super::spec::first_primes(2 * n).last().unwrap_or(&2),
        }
    }
}

/// The sum at one `N`.
#[derive(Debug, Clone, Serialize)]
pub struct GcdSumReport {
    pub n: u64,
    pub sum: f64,
    /// `N^{2−ν}/(ψ(N)·f(N)^ν)`.
    pub bound: f64,
    /// `sum / bound`.
    pub ratio: f64,
    pub pairs: u64,
    /// Pairs where the cap `N^{1−ν−εν}` was the smaller argument.
    pub capped_pairs: u64,
    /// `#(𝕀 ∩ [N])·f(N)/N`.
    pub index_density: f64,
    pub density_ok: bool,
    pub within_bound: bool,
}

/// Reports over a grid of `N` with the trend verdict.
#[derive(Debug, Clone, Serialize)]
pub struct GcdSumTrend {
    pub points: Vec<GcdSumReport>,
    /// Largest ratio divided by the first ratio.
    pub growth: f64,
    pub bounded: bool,
    pub verdict: bool,
}

/// Evaluates the gcd sum at `n` for an integer sequence.
pub fn gcd_sum(spec: &SequenceSpec, hyp: &GcdSumHypothesis, n: u64) -> Result<GcdSumReport> {
    hyp.validate()?;
    if !spec.is_integer() {
        return Err(Error::InvalidInput("gcd sums need an integer-valued sequence".into()));
    }
    let nf = n as f64;
    let bound = nf.powf(2.0 - hyp.nu) / (hyp.psi.value(nf) * hyp.f.value(nf).powf(hyp.nu));
    let density = index_density(hyp, n);
    let density_ok = density >= hyp.density_band.0 && density <= hyp.density_band.1;
    if n == 0 {
        return Ok(GcdSumReport {
            n,
            sum: 0.0,
            bound,
            ratio: 0.0,
            pairs: 0,
            capped_pairs: 0,
            index_density: density,
            density_ok,
            within_bound: true,
        });
    }
    let seq = Sequence::new(spec.clone(), hyp.max_index(n), 64)?;
    let primes = match hyp.index_rule {
        IndexRule::Primes => super::spec::first_primes(2 * n),
        IndexRule::All => Vec::new(),
    };
    let terms: Vec<Term> = (n + 1..=2 * n)
        .map(|k| match hyp.index_rule {
            IndexRule::All => seq.term(k),
            IndexRule::Primes => seq.term(primes[(k - 1) as usize]),
        })
        .collect::<Result<_>>()?;
    let cap = nf.powf(1.0 - hyp.nu - hyp.eps * hyp.nu);
    let loglog = nf.ln().ln();
    let lns: Vec<f64> = terms.iter().map(Term::ln).collect();
    let small: Option<Vec<u64>> = terms
        .iter()
        .map(|t| t.to_biguint().and_then(|q| num_traits::ToPrimitive::to_u64(&q)))
        .collect();
    let mut acc = Neumaier::default();
    let mut pairs = 0u64;
    let mut capped = 0u64;
    let len = terms.len();
    for mi in 0..len {
        for ki in 0..=mi {
            pairs += 1;
            let log_ratio = (lns[mi] - lns[ki]).min(loglog);
            if log_ratio <= 0.0 {
                continue;
            }
            let share = match &small {
                Some(v) => v[mi].gcd(&v[ki]) as f64 / v[mi] as f64,
                None => {
                    let a = terms[mi].to_biguint().expect("integer");
                    let b = terms[ki].to_biguint().expect("integer");
                    let g = a.gcd(&b);
                    (crate::arith::cf::ln_big(&g) - lns[mi]).exp()
                }
            };
            let value = share * log_ratio;
            if value >= cap {
                capped += 1;
                acc.add(cap);
            } else {
                acc.add(value);
            }
        }
    }
    let sum = acc.sum();
    Ok(GcdSumReport {
        n,
        sum,
        bound,
        ratio: sum / bound,
        pairs,
        capped_pairs: capped,
        index_density: density,
        density_ok,
        within_bound: sum <= bound,
    })
}

fn index_density(hyp: &GcdSumHypothesis, n: u64) -> f64 {
    if n < 2 {
        return f64::NAN;
    }
    let count = match hyp.index_rule {
        IndexRule::All => n as usize,
        IndexRule::Primes => primes_up_to(n).len(),
    };
    count as f64 * hyp.f.value(n as f64) / n as f64
}

/// Evaluates [`gcd_sum`] over `ns` and applies the bounded-trend test.
pub fn gcd_sum_trend(spec: &SequenceSpec, hyp: &GcdSumHypothesis, ns: &[u64]) -> Result<GcdSumTrend> {
    let points = ns
        .iter()
        .map(|&n| gcd_sum(spec, hyp, n))
        .collect::<Result<Vec<_>>>()?;
    let first = points.first().map_or(0.0, |p| p.ratio);
    let max = points.iter().map(|p| p.ratio).fold(0.0, f64::max);
    let growth = if first > 0.0 { max / first } else if max == 0.0 { 1.0 } else { f64::INFINITY };
    let bounded = growth <= hyp.trend_band;
    let verdict = bounded && points.iter().all(|p| p.density_ok || p.n < 2);
    Ok(GcdSumTrend {
        points,
        growth,
        bounded,
        verdict,
    })
}

/// `true` when all terms are pairwise coprime (used for prime powers).
pub fn pairwise_coprime(values: &[u64]) -> bool {
    values
        .iter()
        .enumerate()
        .all(|(i, a)| values[..i].iter().all(|b| a.gcd(b) == 1))
}

/// Checks that every index on a prime rule really is prime (sanity helper).
pub fn indices_are_prime(indices: &[u64]) -> bool {
    indices.iter().all(|&p| is_prime(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_window_is_zero() {
        let r = gcd_sum(&SequenceSpec::PrimePower { d: 2 }, &GcdSumHypothesis::new(2.0), 0).unwrap();
        assert_eq!(r.sum, 0.0);
        assert_eq!(r.pairs, 0);
    }

    /// Direct evaluation with no shortcuts.
    fn brute(values: &[u64], n: u64, nu: f64, eps: f64) -> f64 {
        let nf = n as f64;
        let cap = nf.powf(1.0 - nu - eps * nu);
        let mut s = 0.0;
        for m in n + 1..=2 * n {
            for k in n + 1..=m {
                let (a, b) = (values[m as usize - 1], values[k as usize - 1]);
                let inner = (a.gcd(&b) as f64 / a as f64) * ((a as f64 / b as f64).ln()).min(nf.ln().ln());
                s += inner.min(cap);
            }
        }
        s
    }

    #[test]
    fn matches_brute_force() {
        let values: Vec<u64> = super::super::spec::first_primes(80).iter().map(|p| p * p).collect();
        let h = GcdSumHypothesis::new(2.0);
        for n in [5u64, 17, 40] {
            let r = gcd_sum(&SequenceSpec::PrimePower { d: 2 }, &h, n).unwrap();
            assert!((r.sum - brute(&values, n, 2.0, 0.1)).abs() < 1e-12 * (1.0 + r.sum));
        }
        let mult: Vec<u64> = (1..=80).map(|k| 7 * k).collect();
        let spec = SequenceSpec::Polynomial { coefficients: vec![0, 7] };
        let h = GcdSumHypothesis::new(1.0);
        let r = gcd_sum(&spec, &h, 30).unwrap();
        assert!((r.sum - brute(&mult, 30, 1.0, 0.1)).abs() < 1e-9);
    }

    #[test]
    fn prime_squares_pass_and_multiples_fail() {
        let h = GcdSumHypothesis::new(2.0);
        let ok = gcd_sum(&SequenceSpec::PrimePower { d: 2 }, &h, 64).unwrap();
        assert!(ok.within_bound);
        let spec = SequenceSpec::Polynomial { coefficients: vec![0, 7] };
        let bad = gcd_sum(&spec, &h, 64).unwrap();
        assert!(!bad.within_bound, "{bad:?}");
    }

    #[test]
    fn prime_squares_are_coprime() {
        let v: Vec<u64> = super::super::spec::first_primes(200).iter().map(|p| p * p).collect();
        assert!(pairwise_coprime(&v));
        assert!(indices_are_prime(&super::super::spec::first_primes(50)));
    }

    #[test]
    fn prime_indices_for_monomials() {
        let spec = SequenceSpec::monomial(3);
        let h = GcdSumHypothesis::for_spec(&spec, 1.0);
        assert_eq!(h.index_rule, IndexRule::Primes);
        let r = gcd_sum(&spec, &h, 100).unwrap();
        assert!(r.density_ok, "{}", r.index_density);
    }

    #[test]
    fn doubling_constants() {
        assert_eq!(SlowFunction::Constant(3.0).doubling_constant(1, 10), 1.0);
        assert!(SlowFunction::Log.doubling_constant(4, 30) <= 1.25 + 1e-12);
    }
}
