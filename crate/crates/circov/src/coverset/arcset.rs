//! Unions of half-open circle arcs with exact 64-bit fixed-point endpoints.
//!
//! The circle `ℝ/ℤ` is identified with `[0, 2^64)` in units of `2^-64`.
//! An [`ArcSet`] stores sorted, pairwise-disjoint, non-adjacent intervals
//! `[start, end)` with `0 ≤ start < end ≤ 2^64`; a component that wraps
//! through 0 is stored as two intervals touching `0` and `2^64`.

use serde::Serialize;

/// One full turn in fixed-point units.
pub const TURN: u128 = 1u128 << 64;

/// An arc `[center − length/2, center + length/2)` on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arc {
    /// Centre in units of `2^-64`.
    pub center: u64,
    /// Length in units of `2^-64`, at most one turn.
    pub length: u128,
}

impl Arc {
    /// Arc with the length clipped to the full circle.
    pub fn new(center: u64, length: u128) -> Self {
        Arc {
            center,
            length: length.min(TURN),
        }
    }

    /// Arc from real-valued centre and length (both reduced/clipped).
    pub fn from_f64(center: f64, length: f64) -> Self {
        let c = center.rem_euclid(1.0);
        Arc::new(to_fixed(c) as u64, length_to_fixed(length))
    }

    /// Start point `center − ⌊length/2⌋` (mod one turn).
    pub fn start(&self) -> u64 {
        self.center.wrapping_sub((self.length / 2) as u64)
    }

    /// The arc as at most two linear pieces inside `[0, 2^64]`.
    pub fn pieces(&self) -> ([(u128, u128); 2], usize) {
        if self.length >= TURN {
            return ([(0, TURN), (0, 0)], 1);
        }
        if self.length == 0 {
            return ([(0, 0), (0, 0)], 0);
        }
        let s = self.start() as u128;
        let e = s + self.length;
        if e <= TURN {
            ([(s, e), (0, 0)], 1)
        } else {
            ([(s, TURN), (0, e - TURN)], 2)
        }
    }

    /// `true` when the fixed-point position `p` lies on the arc.
    pub fn contains(&self, p: u64) -> bool {
        (p.wrapping_sub(self.start()) as u128) < self.length
    }
}

/// Converts a value in `[0, 1)` to fixed point (rounding down).
pub fn to_fixed(x: f64) -> u128 {
    if x <= 0.0 {
        0
    } else if x >= 1.0 {
        TURN
    } else {
        (x * TURN as f64) as u128
    }
}

/// Converts a length in `[0, 1]` to fixed point, rounding to nearest.
pub fn length_to_fixed(len: f64) -> u128 {
    if !(len > 0.0) {
        0
    } else if len >= 1.0 {
        TURN
    } else {
        ((len * TURN as f64).round() as u128).min(TURN)
    }
}

/// A finite union of disjoint half-open arcs.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ArcSet {
    arcs: Vec<(u128, u128)>,
    measure: u128,
}

impl ArcSet {
    /// The whole circle.
    pub fn full() -> Self {
        ArcSet {
            arcs: vec![(0, TURN)],
            measure: TURN,
        }
    }

    /// The empty set.
    pub fn empty() -> Self {
        ArcSet::default()
    }

    /// Builds a set from arbitrary linear intervals in `[0, 2^64]`, merging overlaps.
    pub fn from_intervals(mut intervals: Vec<(u128, u128)>) -> Self {
        intervals.retain(|&(s, e)| s < e && e <= TURN);
        intervals.sort_unstable();
        let mut arcs: Vec<(u128, u128)> = Vec::with_capacity(intervals.len());
        for (s, e) in intervals {
            match arcs.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => arcs.push((s, e)),
            }
        }
        let measure = arcs.iter().map(|(s, e)| e - s).sum();
        ArcSet { arcs, measure }
    }

    /// Sorted linear pieces.
    pub fn intervals(&self) -> &[(u128, u128)] {
        &self.arcs
    }

    /// Exact measure in units of `2^-64`.
    pub fn measure(&self) -> u128 {
        self.measure
    }

    /// Measure as a fraction of the circle.
    pub fn measure_f64(&self) -> f64 {
        self.measure as f64 / TURN as f64
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Number of connected components on the circle.
    pub fn components(&self) -> usize {
        let n = self.arcs.len();
        if n >= 2 && self.arcs[0].0 == 0 && self.arcs[n - 1].1 == TURN {
            n - 1
        } else {
            n
        }
    }

    /// Removes `arc` from the set.
    pub fn subtract_arc(&mut self, arc: &Arc) {
        let (pieces, count) = arc.pieces();
        for &(s, e) in &pieces[..count] {
            self.subtract_linear(s, e);
        }
    }

    /// Removes the linear interval `[s, e)`.
    pub fn subtract_linear(&mut self, s: u128, e: u128) {
        if s >= e || self.arcs.is_empty() {
            return;
        }
        // first interval with end > s
        let first = self.arcs.partition_point(|&(_, end)| end <= s);
        let mut i = first;
        let mut replacement: [(u128, u128); 2] = [(0, 0); 2];
        let mut kept = 0;
        let mut removed = 0u128;
        while i < self.arcs.len() && self.arcs[i].0 < e {
            let (a, b) = self.arcs[i];
            let cut_lo = a.max(s);
            let cut_hi = b.min(e);
            removed += cut_hi - cut_lo;
            if a < s {
                replacement[kept] = (a, s);
                kept += 1;
            }
            if b > e {
                replacement[kept] = (e, b);
                kept += 1;
            }
            i += 1;
        }
        if i == first {
            return;
        }
        self.measure -= removed;
        self.arcs.splice(first..i, replacement[..kept].iter().copied());
    }

    /// `true` if the fixed-point position lies in the set.
    pub fn contains(&self, p: u64) -> bool {
        let p = p as u128;
        let i = self.arcs.partition_point(|&(_, end)| end <= p);
        i < self.arcs.len() && self.arcs[i].0 <= p
    }

    /// Recomputes the measure from the pieces (for invariant checks).
    pub fn recomputed_measure(&self) -> u128 {
        self.arcs.iter().map(|(s, e)| e - s).sum()
    }

    /// Checks sortedness, disjointness, non-adjacency and the cached measure.
    pub fn check_invariants(&self) -> bool {
        let ordered = self.arcs.iter().all(|&(s, e)| s < e && e <= TURN)
            && self.arcs.windows(2).all(|w| w[0].1 < w[1].0);
        ordered && self.recomputed_measure() == self.measure
    }
}
