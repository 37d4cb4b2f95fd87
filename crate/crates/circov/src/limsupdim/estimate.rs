//! Dimension predictions and box-counting estimates over random `x`.
//!
//! For depth-`m` cylinders of side `h = b^{−m}` the arcs with radius
//! comparable to `h` are those with `n ≍ h^{−1/ν}`. Each depth is
//! therefore paired with the tail `(N₀, 2N₀]`, `N₀ = ⌈b^{m/ν}⌉`. The
//! union of those arcs is the natural cover of the limsup set at that
//! scale. Its cylinder count grows like `h^{−d}`, where `d` is the
//! dimension of the limsup set inside `G`.

use rayon::prelude::*;
use serde::Serialize;

use super::boxes::box_hits_with;
use super::digits::DigitSet;
use crate::error::{Error, Result};
use crate::rng::sub_rng;
use crate::sequences::gap::least_squares;
use crate::sequences::SequenceSpec;
use crate::tree::OrbitSource;

/// Stream purpose tag for drawing `x`.
const PURPOSE_X: u64 = 0x7831;

/// Predicted dimension of the limsup set inside an `s`-regular set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prediction {
    /// `1/ν + s − 1`.
    Value { dimension: f64 },
    /// The intersection is empty for almost every `x`; `threshold = 1/(1−s)`.
    Empty { threshold: f64 },
}

/// `1/ν + s − 1` when nonnegative, otherwise empty (`ν > 1/(1−s)`).
pub fn predicted_dimension(nu: f64, s: f64) -> Result<Prediction> {
    if !(nu >= 1.0) || !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidInput(format!("need ν ≥ 1 and s ∈ (0, 1], got ν = {nu}, s = {s}")));
    }
    let threshold = if s >= 1.0 { f64::INFINITY } else { 1.0 / (1.0 - s) };
    if nu > threshold {
        Ok(Prediction::Empty { threshold })
    } else {
        Ok(Prediction::Value {
            dimension: (1.0 / nu + s - 1.0).max(0.0),
        })
    }
}

/// Cylinder depth in base `b` whose side is closest to `2^{−j}` from above.
pub fn cylinder_depth(j: u32, g: &DigitSet) -> u32 {
    ((j as f64 * 2f64.ln() / (g.base() as f64).ln()) + 1e-9).floor().max(1.0) as u32
}

/// Tail start paired with depth `m`: `⌈b^{m/ν}⌉`.
pub fn coupled_tail_start(m: u32, nu: u32, g: &DigitSet) -> u64 {
    ((g.base() as f64).powf(m as f64 / nu as f64) - 1e-9).ceil().max(1.0) as u64
}

/// What to estimate.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionPlan {
    pub seq: SequenceSpec,
    pub nu: u32,
    /// Dyadic scale exponents `j`; converted to cylinder depths of `G`.
    pub depths: Vec<u32>,
    /// Number of random `x`.
    pub seeds: u64,
    pub master_seed: u64,
    /// `N₁ = tail_factor · N₀`.
    pub tail_factor: u64,
}

impl DimensionPlan {
    pub fn new(seq: SequenceSpec, nu: u32, depths: Vec<u32>, seeds: u64, master_seed: u64) -> Self {
        DimensionPlan {
            seq,
            nu,
            depths,
            seeds,
            master_seed,
            tail_factor: 2,
        }
    }
}

/// Counts at one scale across seeds.
#[derive(Debug, Clone, Serialize)]
pub struct ScaleRow {
    pub depth: u32,
    /// `ln(1/h) = m·ln b`.
    pub log_inverse_scale: f64,
    pub tail: (u64, u64),
    pub counts: Vec<u128>,
    pub mean_count: f64,
}

/// Outcome of the regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DimensionVerdict {
    Estimated,
    /// Every count was zero.
    Empty,
}

/// Box-counting dimension estimate.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionEstimate {
    pub verdict: DimensionVerdict,
    /// Mean of the per-seed slopes.
    pub slope: f64,
    /// Intercept of the regression of mean log counts.
    pub intercept: f64,
    /// RMS residual of that regression.
    pub residual: f64,
    pub per_seed_slopes: Vec<f64>,
    /// Standard deviation of the per-seed slopes.
    pub spread: f64,
    pub scales: Vec<ScaleRow>,
    pub predicted: Prediction,
}

/// Estimates the dimension of the limsup set inside `G` for random `x`.
pub fn estimate_dimension(plan: &DimensionPlan, g: &DigitSet) -> Result<DimensionEstimate> {
    let mut depths: Vec<u32> = plan.depths.iter().map(|&j| cylinder_depth(j, g)).collect();
    depths.sort_unstable();
    depths.dedup();
    if depths.len() < 3 {
        return Err(Error::InvalidInput("at least three distinct scales are needed".into()));
    }
    if plan.seeds < 1 || plan.nu == 0 || plan.tail_factor < 2 {
        return Err(Error::InvalidInput("need ≥ 1 seed, ν ≥ 1 and a tail factor ≥ 2".into()));
    }
    let tails: Vec<(u64, u64)> = depths
        .iter()
        .map(|&m| {
            let n0 = coupled_tail_start(m, plan.nu, g);
            (n0, n0 * plan.tail_factor)
        })
        .collect();
    let max_index = tails.iter().map(|t| t.1).max().expect("nonempty");
    let per_seed: Vec<Vec<u128>> = (0..plan.seeds)
        .into_par_iter()
        .map(|seed| {
            let mut rng = sub_rng(plan.master_seed, seed, PURPOSE_X);
            let orbit = OrbitSource::random(plan.seq.clone(), max_index, &mut rng)?;
            depths
                .iter()
                .zip(&tails)
                .map(|(&m, &tail)| box_hits_with(&orbit, plan.nu, tail, g, m).map(|h| h.count))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = depths.iter().map(|&m| m as f64 * (g.base() as f64).ln()).collect();
    let scales: Vec<ScaleRow> = depths
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let counts: Vec<u128> = per_seed.iter().map(|c| c[i]).collect();
            ScaleRow {
                depth: m,
                log_inverse_scale: xs[i],
                tail: tails[i],
                mean_count: counts.iter().map(|&c| c as f64).sum::<f64>() / counts.len() as f64,
                counts,
            }
        })
        .collect();
    let predicted = predicted_dimension(plan.nu as f64, g.dimension())?;
    if per_seed.iter().all(|c| c.iter().all(|&v| v == 0)) {
        return Ok(DimensionEstimate {
            verdict: DimensionVerdict::Empty,
            slope: 0.0,
            intercept: 0.0,
            residual: 0.0,
            per_seed_slopes: Vec::new(),
            spread: 0.0,
            scales,
            predicted,
        });
    }
    let per_seed_slopes: Vec<f64> = per_seed
        .iter()
        .filter_map(|counts| {
            let (px, py): (Vec<f64>, Vec<f64>) = xs
                .iter()
                .zip(counts)
                .filter(|(_, &c)| c > 0)
                .map(|(&x, &c)| (x, (c as f64).ln()))
                .unzip();
            least_squares(&px, &py).map(|(s, _, _)| s)
        })
        .collect();
    let slope = per_seed_slopes.iter().sum::<f64>() / per_seed_slopes.len().max(1) as f64;
    let spread = if per_seed_slopes.len() > 1 {
        let var = per_seed_slopes.iter().map(|s| (s - slope).powi(2)).sum::<f64>() / (per_seed_slopes.len() - 1) as f64;
        var.sqrt()
    } else {
        0.0
    };
    let (mx, my): (Vec<f64>, Vec<f64>) = scales
        .iter()
        .filter(|r| r.mean_count > 0.0)
        .map(|r| (r.log_inverse_scale, r.mean_count.ln()))
        .unzip();
    let (_, intercept, residual) = least_squares(&mx, &my).unwrap_or((0.0, 0.0, 0.0));
    Ok(DimensionEstimate {
        verdict: DimensionVerdict::Estimated,
        slope,
        intercept,
        residual,
        per_seed_slopes,
        spread,
        scales,
        predicted,
    })
}

/// Box counts in the predicted-empty regime as the tail moves out.
#[derive(Debug, Clone, Serialize)]
pub struct EmptinessRow {
    pub tail_start: u64,
    /// Dyadic depth `⌊ν log₂ N₀⌋`.
    pub dyadic_depth: u32,
    pub cylinder_depth: u32,
    pub counts: Vec<u128>,
    pub mean_count: f64,
}

/// Per-seed box counts at depth `⌊ν log₂ N₀⌋` for tails `(N₀, tail_factor·N₀]`.
#[derive(Debug, Clone, Serialize)]
pub struct EmptinessProfile {
    pub rows: Vec<EmptinessRow>,
    /// Every seed's counts are nonincreasing in `N₀` and end at 0.
    pub decreases_to_zero: bool,
}

/// Tracks box counts in the empty regime for growing tail starts.
pub fn emptiness_profile(plan: &DimensionPlan, g: &DigitSet, tail_starts: &[u64]) -> Result<EmptinessProfile> {
    if tail_starts.is_empty() {
        return Err(Error::InvalidInput("no tail starts given".into()));
    }
    let specs: Vec<(u64, u32, u32)> = tail_starts
        .iter()
        .map(|&n0| {
            let j = (plan.nu as f64 * (n0 as f64).log2() + 1e-9).floor() as u32;
            (n0, j, cylinder_depth(j, g))
        })
        .collect();
    let max_index = specs.iter().map(|s| s.0 * plan.tail_factor).max().expect("nonempty");
    let per_seed: Vec<Vec<u128>> = (0..plan.seeds)
        .into_par_iter()
        .map(|seed| {
            let mut rng = sub_rng(plan.master_seed, seed, PURPOSE_X);
            let orbit = OrbitSource::random(plan.seq.clone(), max_index, &mut rng)?;
            specs
                .iter()
                .map(|&(n0, _, m)| box_hits_with(&orbit, plan.nu, (n0, n0 * plan.tail_factor), g, m).map(|h| h.count))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<EmptinessRow> = specs
        .iter()
        .enumerate()
        .map(|(i, &(n0, j, m))| {
            let counts: Vec<u128> = per_seed.iter().map(|c| c[i]).collect();
            EmptinessRow {
                tail_start: n0,
                dyadic_depth: j,
                cylinder_depth: m,
                mean_count: counts.iter().map(|&c| c as f64).sum::<f64>() / counts.len().max(1) as f64,
                counts,
            }
        })
        .collect();
    let decreases_to_zero = per_seed
        .iter()
        .all(|c| c.windows(2).all(|w| w[1] <= w[0]) && c.last() == Some(&0));
    Ok(EmptinessProfile { rows, decreases_to_zero })
}
