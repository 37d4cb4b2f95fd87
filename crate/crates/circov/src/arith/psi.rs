//! Monotone approximation functions `ψ : ℕ → [0, ∞)`.
//!
//! The recognised families are `c/n^a` and the iterated-logarithm chains
//! `c / (n · L₁(n) ⋯ L_{k−1}(n) · L_k(n)^a)`, where `L_i` is the `i`-fold
//! natural logarithm. Each has a closed-form antiderivative, so window sums
//! over ranges like `(N, 2^N]` can be bracketed rigorously even when `N` is
//! far beyond direct enumeration. `N` is then described by `ln N` alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonincreasing, nonnegative approximation function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Psi {
    /// `ψ ≡ 0`.
    Zero,
    /// `scale / n^exponent`.
    Power { scale: f64, exponent: f64 },
    /// `scale / (n · L₁ ⋯ L_{depth−1} · L_depth^last_exponent)` for `n ≥ start`,
    /// frozen at its value at `start` below it.
    LogChain {
        scale: f64,
        depth: u32,
        last_exponent: f64,
        start: u64,
    },
}

/// Smallest integer where every iterated logarithm up to `depth` is ≥ 1.
pub fn chain_start(depth: u32) -> u64 {
    match depth {
        0 | 1 => 3,
        2 => 16,
        _ => 3_814_280, // ⌈e^{e^e}⌉
    }
}

impl Psi {
    /// `1/(n log n log log n)`.
    pub fn loglog_critical() -> Self {
        Psi::chain(2, 1.0)
    }

    /// `1/(n log n (log log n)^a)`.
    pub fn loglog_power(a: f64) -> Self {
        Psi::chain(2, a)
    }

    /// `1/(n (log n)^a)`.
    pub fn log_power(a: f64) -> Self {
        Psi::chain(1, a)
    }

    /// Unit-scale chain of the given depth and last exponent.
    pub fn chain(depth: u32, last_exponent: f64) -> Self {
        Psi::LogChain {
            scale: 1.0,
            depth,
            last_exponent,
            start: chain_start(depth),
        }
    }

    /// Parses `zero`, `power:c:a`, `log:a` (= `1/(n log^a n)`), `loglog:a`, or
    /// `chain:k:a[:c]`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<f64> {
            parts
                .get(i)
                .ok_or_else(|| Error::InvalidInput(format!("psi spec {s:?} is missing a field")))?
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number in psi spec {s:?}")))
        };
        let psi = match parts[0] {
            "zero" => Psi::Zero,
            "power" => Psi::Power {
                scale: num(1)?,
                exponent: num(2)?,
            },
            "log" => Psi::log_power(num(1)?),
            "loglog" => Psi::loglog_power(num(1)?),
            "chain" => {
                let depth = num(1)? as u32;
                let mut p = Psi::chain(depth, num(2)?);
                if parts.len() > 3 {
                    if let Psi::LogChain { scale, .. } = &mut p {
                        *scale = num(3)?;
                    }
                }
                p
            }
            other => return Err(Error::InvalidInput(format!("unknown psi family {other:?}"))),
        };
        psi.validate()?;
        Ok(psi)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Psi::Zero => Ok(()),
            Psi::Power { scale, exponent } if *scale >= 0.0 && *exponent >= 0.0 => Ok(()),
            Psi::LogChain { scale, depth, last_exponent, .. }
                if *scale >= 0.0 && *depth >= 1 && *last_exponent >= 0.0 =>
            {
                Ok(())
            }
            _ => Err(Error::InvalidInput(format!("psi {self:?} is not nonincreasing and nonnegative"))),
        }
    }

    /// `ψ(n)` for `n ≥ 1`.
    pub fn value(&self, n: u64) -> f64 {
        match self {
            Psi::Zero => 0.0,
            Psi::Power { scale, exponent } => scale / (n as f64).powf(*exponent),
            Psi::LogChain { start, .. } => self.ln_value(n.max(*start) as f64).exp(),
        }
    }

    /// `ln ψ(x)` for real `x` inside the family's natural domain.
    fn ln_value(&self, x: f64) -> f64 {
        self.ln_value_from_ln(x.ln())
    }

    /// `ln ψ(N)` given `u = ln N`.
    pub fn ln_value_from_ln(&self, u: f64) -> f64 {
        match self {
            Psi::Zero => f64::NEG_INFINITY,
            Psi::Power { scale, exponent } => scale.ln() - exponent * u,
            Psi::LogChain {
                scale,
                depth,
                last_exponent,
                ..
            } => {
                let mut acc = scale.ln() - u; // 1/n
                let mut l = u; // L₁
                for i in 1..=*depth {
                    let w = if i == *depth { *last_exponent } else { 1.0 };
                    acc -= w * l.ln();
                    if i < *depth {
                        l = l.ln();
                    }
                }
                acc
            }
        }
    }

    /// `ln ψ(N) + ln N + ln ln N`: nonpositive iff `ψ(N) ≤ 1/(N log N)`.
    ///
    /// The `−ln N` term of `ln ψ` is cancelled symbolically, so the result
    /// stays accurate when `ln N` is far beyond `2^53`.
    pub fn log_excess_over_critical(&self, u: f64) -> f64 {
        match self {
            Psi::Zero => f64::NEG_INFINITY,
            Psi::Power { scale, exponent } => scale.ln() + (1.0 - exponent) * u + u.ln(),
            Psi::LogChain {
                scale,
                depth,
                last_exponent,
                ..
            } => {
                // ln ψ + u + ln u = ln c + ln u − Σ_i w_i ln L_i
                let mut acc = scale.ln() + u.ln();
                let mut l = u;
                for i in 1..=*depth {
                    let w = if i == *depth { *last_exponent } else { 1.0 };
                    acc -= w * l.ln();
                    if i < *depth {
                        l = l.ln();
                    }
                }
                acc
            }
        }
    }

    /// Smallest argument where the closed forms apply.
    pub fn start(&self) -> u64 {
        match self {
            Psi::LogChain { start, .. } => *start,
            _ => 1,
        }
    }

    /// Bracket `[lo, hi]` of `Σ_{N < n ≤ 2^N} ψ(n)` from `u = ln N`.
    ///
    /// Uses `∫_N^{2^N} ψ − ψ(N) ≤ Σ ≤ ∫_N^{2^N} ψ`, valid for nonincreasing ψ.
    /// Requires `N ≥ start`.
    pub fn doubling_window_bracket(&self, u: f64) -> Option<(f64, f64)> {
        if u < (self.start() as f64).ln() {
            return None;
        }
        let upper = self.antiderivative_pow2(u)? - self.antiderivative_ln(u)?;
        let upper = upper.max(0.0);
        let lower = (upper - self.ln_value_from_ln(u).exp()).max(0.0);
        Some((lower, upper))
    }

    /// Antiderivative at `N` given `u = ln N`.
    fn antiderivative_ln(&self, u: f64) -> Option<f64> {
        let logs = IterLogs::from_ln(u);
        self.antiderivative_from(&logs)
    }

    /// Antiderivative at `2^N` given `u = ln N`.
    fn antiderivative_pow2(&self, u: f64) -> Option<f64> {
        let logs = IterLogs::of_pow2(u);
        self.antiderivative_from(&logs)
    }

    fn antiderivative_from(&self, logs: &IterLogs) -> Option<f64> {
        match self {
            Psi::Zero => Some(0.0),
            Psi::Power { scale, exponent } => {
                if (*exponent - 1.0).abs() < 1e-15 {
                    Some(scale * logs.get(1))
                } else {
                    // x^{1−a}/(1−a) with x = e^{L₁}
                    let e = (1.0 - exponent) * logs.get(1);
                    Some(scale * e.exp() / (1.0 - exponent))
                }
            }
            Psi::LogChain {
                scale,
                depth,
                last_exponent,
                ..
            } => {
                let k = *depth as usize;
                if (*last_exponent - 1.0).abs() < 1e-15 {
                    Some(scale * logs.get(k + 1))
                } else {
                    let lk = logs.get(k);
                    let e = 1.0 - last_exponent;
                    Some(scale * (e * lk.ln()).exp() / e)
                }
            }
        }
    }
}

/// Iterated logarithms `L₁, L₂, …` of a huge number, stored without the number itself.
struct IterLogs {
    l1: f64,
    l2: f64,
}

impl IterLogs {
    fn from_ln(u: f64) -> Self {
        IterLogs { l1: u, l2: u.ln() }
    }

    /// Logs of `2^N` where `u = ln N`: `L₁ = N ln 2`, `L₂ = u + ln ln 2`.
    fn of_pow2(u: f64) -> Self {
        let ln_ln2 = std::f64::consts::LN_2.ln();
        IterLogs {
            l1: u.exp() * std::f64::consts::LN_2,
            l2: u + ln_ln2,
        }
    }

    fn get(&self, i: usize) -> f64 {
        match i {
            1 => self.l1,
            _ => {
                let mut v = self.l2;
                for _ in 2..i {
                    v = v.ln();
                }
                v
            }
        }
    }
}

/// Result of a capped window summation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowSum {
    pub value: f64,
    pub first: u64,
    /// Last index requested by the window.
    pub requested_last: f64,
    /// Last index actually summed.
    pub summed_last: u64,
    /// Set when the horizon cut the window short.
    pub capped: bool,
}

/// `Σ_{2^N ≤ n ≤ 2^(c^N)} ψ(n)` by direct (compensated) summation up to `horizon`.
pub fn exp_window_sum(psi: &Psi, n: u32, c: f64, horizon: u64) -> Result<WindowSum> {
    if c <= 1.0 || !c.is_finite() {
        return Err(Error::Precondition(format!("window exponent base c = {c} must exceed 1")));
    }
    if n >= 63 {
        return Err(Error::Precondition("window start 2^N exceeds 64-bit range".into()));
    }
    let first = 1u64 << n;
    let last_exp = c.powf(n as f64);
    let requested_last = 2f64.powf(last_exp).floor();
    let (last, capped) = if requested_last > horizon as f64 {
        (horizon, true)
    } else {
        (requested_last as u64, false)
    };
    let mut s = Neumaier::default();
    if first <= last {
        for k in first..=last {
            s.add(psi.value(k));
        }
    }
    Ok(WindowSum {
        value: s.sum(),
        first,
        requested_last,
        summed_last: last.max(first.saturating_sub(1)),
        capped,
    })
}

/// Compensated (Neumaier) summation accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}
