//! Repeated-covering counts on a finite grid.
//!
//! Arc indices are grouped into dyadic windows: window 0 is `{1}` and window
//! `k ≥ 1` is `(2^{k−1}, 2^k]`. For each grid point `i/m` the count records
//! how many windows contain at least one arc covering it. A point counted
//! in every window up to the horizon is the desk-scale stand-in for a
//! point covered infinitely often.

use serde::Serialize;

use super::arcset::{Arc, TURN};
use super::lengths::LengthSequence;
use crate::error::{Error, Result};

/// Largest supported grid resolution.
pub const MAX_GRID: u64 = 1 << 24;

/// Window index of arc `n ≥ 1`.
pub fn window_of(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Per-point window counts.
#[derive(Debug, Clone, Serialize)]
pub struct GridCoverage {
    pub resolution: u64,
    /// Number of arcs consumed.
    pub arcs: u64,
    /// Number of windows the consumed arcs span.
    pub windows: u32,
    pub counts: Vec<u32>,
    pub min_count: u32,
    pub max_count: u32,
}

impl GridCoverage {
    /// Fraction of grid points hit in every window.
    pub fn fully_covered_fraction(&self) -> f64 {
        if self.counts.is_empty() {
            return 0.0;
        }
        let full = self.counts.iter().filter(|&&c| c == self.windows).count();
        full as f64 / self.counts.len() as f64
    }
}

/// Counts, for each grid point `i/m`, the dyadic windows in which some arc
/// `n ≤ N` covers it. `centers` yields `X₁, X₂, …` as 64-bit fixed-point
/// positions. Membership is decided exactly in integers.
pub fn grid_covered_infinitely_often<I>(
    lengths: &LengthSequence,
    centers: I,
    horizon: u64,
    resolution: u64,
) -> Result<GridCoverage>
where
    I: IntoIterator<Item = u64>,
{
    if resolution == 0 || resolution > MAX_GRID {
        return Err(Error::InvalidInput(format!(
            "grid resolution must be in 1..={MAX_GRID}, got {resolution}"
        )));
    }
    let m = resolution as usize;
    let mut counts = vec![0u32; m];
    let mut last_window = vec![u32::MAX; m];
    let mut arcs = 0u64;
    for (idx, center) in centers.into_iter().take(horizon as usize).enumerate() {
        let n = idx as u64 + 1;
        arcs = n;
        let w = window_of(n);
        let arc = Arc::new(center, lengths.fixed(n));
        let (pieces, count) = arc.pieces();
        for &(s, e) in &pieces[..count] {
            // grid index i hits [s, e) iff s·m ≤ i·2^64 < e·m
            let lo = (s * resolution as u128).div_ceil(TURN) as usize;
            let hi = (e * resolution as u128).div_ceil(TURN) as usize;
            for i in lo..hi.min(m) {
                if last_window[i] != w {
                    last_window[i] = w;
                    counts[i] += 1;
                }
            }
        }
    }
    let windows = if arcs == 0 { 0 } else { window_of(arcs) + 1 };
    let min_count = counts.iter().copied().min().unwrap_or(0);
    let max_count = counts.iter().copied().max().unwrap_or(0);
    Ok(GridCoverage {
        resolution,
        arcs,
        windows,
        counts,
        min_count,
        max_count,
    })
}
