//! Block statistics and the covering/non-covering classification for the
//! randomised model.
//!
//! Indices `n` are sorted into buckets `S_ℓ` by the size of
//! `ψ(n)/∥nα − γ∥ ∈ [b^{−ℓ}, b^{1−ℓ})`. Two index ranges are supported:
//! the covering range `b^{2ℓ} < n ≤ b^{b^ℓ}` (weights `b^{−ℓ}`) and the
//! non-covering range `n ≤ b^{b^ℓ}` (weights `b^{1−ℓ}`). Enumeration stops
//! at a horizon, which is reported.
//!
//! The classification itself uses the doubling-window sums
//! `Σ_{N < n ≤ 2^N} ψ(n)`, bracketed in closed form on a grid of `ln ln N`.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{CircleOrbit, Psi};
use crate::error::{Error, Result};

/// Verdict of [`psi_regime`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Regime {
    CoveringLike,
    NoncoveringLike,
    Indeterminate,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::CoveringLike => "COVERING-LIKE",
            Regime::NoncoveringLike => "NONCOVERING-LIKE",
            Regime::Indeterminate => "INDETERMINATE",
        })
    }
}

/// Which index range and weights define the buckets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BucketRange {
    /// `b^{2ℓ} < n ≤ b^{b^ℓ}`, weight `b^{−ℓ}`.
    Covering,
    /// `n ≤ b^{b^ℓ}`, weight `b^{1−ℓ}`.
    Noncovering,
}

/// Tunable constants of the classification.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeConfig {
    /// Window sums must exceed this for a covering verdict.
    pub covering_constant: f64,
    /// Window sums must stay below this for a non-covering verdict.
    pub epsilon: f64,
    /// Largest `n` enumerated for the buckets and the pointwise check.
    pub horizon: u64,
    /// Number of `ln ln N` grid points.
    pub grid_points: usize,
    /// Largest `ln ln N` on the grid.
    pub max_lnln: f64,
    /// Replace `ψ(n)` by `ψ(b^j)` on each block `b^{j−1} < n ≤ b^j` before
    /// bucketing, making `ψ` constant on `b`-adic blocks.
    pub snap_b_adic: bool,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        RegimeConfig {
            covering_constant: 8.0,
            epsilon: 0.125,
            horizon: 1 << 22,
            grid_points: 64,
            max_lnln: 700.0,
            snap_b_adic: false,
        }
    }
}

/// Bracketed window sum at one grid point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WindowRow {
    /// `ln ln N`.
    pub lnln_n: f64,
    pub lower: f64,
    pub upper: f64,
    /// `ln ψ(N) + ln N + ln ln N` (≤ 0 iff `ψ(N) ≤ 1/(N log N)`).
    pub excess: f64,
}

/// Bucket sizes, block sums, window sums and the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeDiagnostics {
    pub config: RegimeConfig,
    pub b: u64,
    pub depth: u32,
    pub range: BucketRange,
    pub horizon: u64,
    /// `#S_ℓ` for `ℓ = 1 … L`, counting only `n ≤ horizon`.
    pub s_ell_sizes: Vec<u64>,
    /// Buckets whose index range extends past the horizon.
    pub capped: Vec<bool>,
    /// Indices whose ratio fell in some bucket but outside its index range.
    pub out_of_range: u64,
    pub t1: u64,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub t2: BigRational,
    pub t2_f64: f64,
    /// `ψ(n) ≤ 1/(n log n)` for every enumerated `n ≥ 2` and every grid point.
    pub pointwise_below_critical: bool,
    pub windows: Vec<WindowRow>,
    /// Smallest lower bracket and largest upper bracket over the tested tail.
    pub tail_min_lower: f64,
    pub tail_max_upper: f64,
    pub classification: Regime,
}

impl RegimeDiagnostics {
    /// `T₁` recomputed from the bucket sizes.
    pub fn t1_from_sizes(&self) -> u64 {
        self.s_ell_sizes.iter().sum()
    }

    /// `T₂` recomputed from the bucket sizes.
    pub fn t2_from_sizes(&self) -> BigRational {
        let b = BigUint::from(self.b);
        self.s_ell_sizes
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let ell = i as u32 + 1;
                let exp = match self.range {
                    BucketRange::Covering => ell,
                    BucketRange::Noncovering => ell - 1,
                };
                BigRational::new(BigUint::from(s).into(), Pow::pow(&b, exp).into())
            })
            .fold(BigRational::zero(), |a, x| a + x)
    }
}

/// Bucket `ℓ ≥ 1` with `b^{−ℓ} ≤ r < b^{1−ℓ}`, if any.
fn bucket_of(r: f64, b: f64) -> Option<u32> {
    if !(r > 0.0) || r >= 1.0 {
        return None;
    }
    let mut ell = (-r.ln() / b.ln()).floor().max(0.0) as i64 + 1;
    // settle rounding at the bucket edges
    while ell > 1 && r >= b.powi(-(ell as i32 - 1)) {
        ell -= 1;
    }
    while r < b.powi(-(ell as i32)) {
        ell += 1;
    }
    u32::try_from(ell).ok()
}

/// Smallest power `b^j ≥ n` (saturating).
fn block_end(n: u64, b: u64) -> u64 {
    let mut p = 1u64;
    while p < n {
        p = p.saturating_mul(b);
    }
    p
}

/// `ln` of the upper end `b^{b^ℓ}` of bucket `ℓ`'s index range.
fn ln_range_top(b: f64, ell: u32) -> f64 {
    b.powi(ell as i32) * b.ln()
}

/// Computes `S_ℓ`, `T₁`, `T₂` and classifies `ψ` for the rotation `n ↦ nα − γ`.
pub fn psi_regime(orbit: &CircleOrbit, psi: &Psi, b: u64, depth: u32, config: &RegimeConfig) -> Result<RegimeDiagnostics> {
    if b < 2 {
        return Err(Error::InvalidInput("block base b must be at least 2".into()));
    }
    if depth == 0 || depth > 64 {
        return Err(Error::InvalidInput("depth L must lie in 1..=64".into()));
    }
    if config.horizon < 2 || config.grid_points < 2 {
        return Err(Error::InvalidInput("horizon and grid size must be at least 2".into()));
    }
    let bf = b as f64;

    // Pointwise comparison with 1/(n log n), on enumerated n and on the grid.
    let mut pointwise = true;
    for n in 2..=config.horizon {
        let v = psi.value(n);
        let nf = n as f64;
        if v * nf * nf.ln() > 1.0 + 1e-12 {
            pointwise = false;
            break;
        }
    }

    let windows = window_grid(psi, config);
    pointwise &= windows.iter().all(|w| w.excess <= 1e-12);
    let range = if pointwise {
        BucketRange::Noncovering
    } else {
        BucketRange::Covering
    };

    // Streaming bucket counts with exact accumulators.
    let mut sizes = vec![0u64; depth as usize];
    let mut out_of_range = 0u64;
    let mut t1 = 0u64;
    let bb = BigUint::from(b);
    let weights: Vec<BigUint> = (1..=depth).map(|ell| Pow::pow(&bb, depth - ell)).collect();
    let mut t2_num = BigUint::zero();
    for n in 1..=config.horizon {
        let d = orbit.dist_f64(n);
        let v = if config.snap_b_adic {
            psi.value(block_end(n, b))
        } else {
            psi.value(n)
        };
        let r = if d == 0.0 {
            if v > 0.0 { f64::INFINITY } else { 0.0 }
        } else {
            v / d
        };
        let Some(ell) = bucket_of(r, bf) else { continue };
        if ell > depth {
            continue;
        }
        let ln_n = (n as f64).ln();
        let in_range = ln_n <= ln_range_top(bf, ell)
            && match range {
                BucketRange::Covering => ln_n > 2.0 * ell as f64 * bf.ln(),
                BucketRange::Noncovering => true,
            };
        if !in_range {
            out_of_range += 1;
            continue;
        }
        sizes[ell as usize - 1] += 1;
        t1 += 1;
        t2_num += &weights[ell as usize - 1];
    }
    let denom_exp = match range {
        BucketRange::Covering => depth,
        BucketRange::Noncovering => depth - 1,
    };
    let t2 = BigRational::new(t2_num.into(), Pow::pow(&bb, denom_exp).into());
    let ln_h = (config.horizon as f64).ln();
    let capped = (1..=depth).map(|ell| ln_range_top(bf, ell) > ln_h).collect();

    // Classification on the upper half of the grid (the limsup proxy).
    let tail = &windows[windows.len() / 2..];
    let complete: Vec<&WindowRow> = tail.iter().filter(|w| w.upper.is_finite()).collect();
    let tail_min_lower = complete.iter().map(|w| w.lower).fold(f64::INFINITY, f64::min);
    let tail_max_upper = complete.iter().map(|w| w.upper).fold(f64::NEG_INFINITY, f64::max);
    let classification = if complete.is_empty() {
        Regime::Indeterminate
    } else if tail_min_lower > config.covering_constant {
        Regime::CoveringLike
    } else if pointwise && tail_max_upper < config.epsilon {
        Regime::NoncoveringLike
    } else {
        Regime::Indeterminate
    };

    Ok(RegimeDiagnostics {
        config: config.clone(),
        b,
        depth,
        range,
        horizon: config.horizon,
        s_ell_sizes: sizes,
        capped,
        out_of_range,
        t1,
        t2_f64: t2.to_f64().unwrap_or(f64::NAN),
        t2,
        pointwise_below_critical: pointwise,
        windows,
        tail_min_lower,
        tail_max_upper,
        classification,
    })
}

/// Window brackets on an evenly spaced grid of `ln ln N` up to `max_lnln`.
fn window_grid(psi: &Psi, config: &RegimeConfig) -> Vec<WindowRow> {
    let start = (psi.start().max(3) as f64).ln().ln().max(0.5);
    let top = config.max_lnln.max(start + 1.0);
    let k = config.grid_points;
    (0..k)
        .map(|i| {
            let v = start + (top - start) * i as f64 / (k - 1) as f64;
            let u = v.exp();
            let (lower, upper) = psi.doubling_window_bracket(u).unwrap_or((f64::NAN, f64::NAN));
            WindowRow {
                lnln_n: v,
                lower,
                upper,
                excess: psi.log_excess_over_critical(u),
            }
        })
        .collect()
}
