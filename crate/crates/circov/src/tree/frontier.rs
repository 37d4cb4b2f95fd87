//! Surviving vertices of one tree level and the coloring step.
//!
//! Vertex `k` at level `n` is the dyadic interval `[k/2ⁿ, (k+1)/2ⁿ)`. A
//! frontier is stored as sorted, disjoint, non-adjacent half-open index
//! intervals. That is compact both when few vertices survive and when
//! almost all do.

use serde::Serialize;

use crate::arith::{UnitPoint, Wide};
use crate::error::{exhausted, Error, Result};

/// Deepest supported level (indices must fit in `u64`).
pub const MAX_LEVEL: u32 = 62;

/// Default growth base for the survivor-count threshold.
pub const DEFAULT_THRESHOLD_BASE: f64 = 1.2;

/// How a point removes survivors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// A point removes the vertex it lands in.
    Plain,
    /// A point removes the vertex it lands in and both cyclic neighbours.
    Thick,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plain" => Ok(Mode::Plain),
            "thick" => Ok(Mode::Thick),
            _ => Err(Error::InvalidInput(format!("unknown tree mode {s:?} (plain or thick)"))),
        }
    }
}

/// Per-level statistics of a coloring step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelStats {
    pub level: u32,
    /// Survivors before coloring.
    pub survivor_count: u64,
    /// `C_n`: points landing in a survivor (plain) or in a survivor or one of
    /// its neighbours (thick).
    pub colored_hits: u64,
    /// Points used for coloring on this level.
    pub points_placed: u64,
    /// Survivors left after coloring; the next level holds twice as many.
    pub survivors_after: u64,
    /// `survivors_after ≥ baseⁿ`.
    pub threshold_met: bool,
}

impl LevelStats {
    /// Checks the exact recursion bound of the mode.
    pub fn recursion_bound_holds(&self, mode: Mode) -> bool {
        let per_hit = match mode {
            Mode::Plain => 1,
            Mode::Thick => 3,
        };
        let next = 2 * self.survivors_after;
        let floor = self.survivor_count.saturating_sub(per_hit * self.colored_hits);
        next >= 2 * floor
    }
}

/// Surviving vertex indices at one level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frontier {
    level: u32,
    intervals: Vec<(u64, u64)>,
    count: u64,
    mode: Mode,
    #[serde(skip)]
    threshold_base: f64,
}

impl Frontier {
    /// All `2ⁿ` vertices of level `n`.
    pub fn full(level: u32, mode: Mode) -> Result<Self> {
        check_level(level)?;
        let size = 1u64 << level;
        Ok(Frontier {
            level,
            intervals: vec![(0, size)],
            count: size,
            mode,
            threshold_base: DEFAULT_THRESHOLD_BASE,
        })
    }

    /// Frontier holding exactly the given indices.
    pub fn from_indices(level: u32, indices: &[u64], mode: Mode) -> Result<Self> {
        check_level(level)?;
        let size = 1u64 << level;
        if let Some(bad) = indices.iter().find(|&&i| i >= size) {
            return Err(Error::InvalidInput(format!("index {bad} out of range at level {level}")));
        }
        let intervals = normalize(indices.iter().map(|&i| (i, i + 1)).collect());
        Ok(Frontier {
            level,
            count: measure(&intervals),
            intervals,
            mode,
            threshold_base: DEFAULT_THRESHOLD_BASE,
        })
    }

    /// Sets the base of the survivor threshold reported in [`LevelStats`].
    pub fn with_threshold_base(mut self, base: f64) -> Self {
        self.threshold_base = base;
        self
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn survivor_count(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Sorted half-open index intervals.
    pub fn intervals(&self) -> &[(u64, u64)] {
        &self.intervals
    }

    /// All surviving indices (use only on small frontiers).
    pub fn indices(&self) -> Vec<u64> {
        self.intervals.iter().flat_map(|&(a, b)| a..b).collect()
    }

    pub fn contains(&self, k: u64) -> bool {
        contains(&self.intervals, k)
    }

    /// Cells whose points can remove a survivor: the survivors themselves
    /// (plain) or the survivors and their cyclic neighbours (thick).
    pub fn relevant_cells(&self) -> Vec<(u64, u64)> {
        match self.mode {
            Mode::Plain => self.intervals.clone(),
            Mode::Thick => {
                let size = 1u64 << self.level;
                let mut out = Vec::with_capacity(self.intervals.len() + 2);
                for &(a, b) in &self.intervals {
                    push_cyclic(&mut out, a as i128 - 1, b as i128 + 1, size);
                }
                normalize(out)
            }
        }
    }

    /// Removes the survivors affected by points in the given cells (any
    /// order, repeats allowed) and returns the surviving set at this level
    /// together with the statistics. `points_placed` is the number of
    /// points behind `cells`, including those outside the relevant set.
    pub fn color_cells(&self, cells: &[u64], points_placed: u64) -> (Frontier, LevelStats) {
        let relevant = self.relevant_cells();
        let hits = cells.iter().filter(|&&k| contains(&relevant, k)).count() as u64;
        self.apply_coloring(cells, hits, points_placed)
    }

    /// Coloring step with a precomputed `C_n`; `cells` lists each hit cell once.
    pub(crate) fn apply_coloring(&self, cells: &[u64], hits: u64, points_placed: u64) -> (Frontier, LevelStats) {
        let size = 1u64 << self.level;
        let mut removal = Vec::with_capacity(cells.len() + 2);
        for &k in cells {
            match self.mode {
                Mode::Plain => removal.push((k, k + 1)),
                Mode::Thick => push_cyclic(&mut removal, k as i128 - 1, k as i128 + 2, size),
            }
        }
        let removal = normalize(removal);
        let intervals = subtract(&self.intervals, &removal);
        let count = measure(&intervals);
        let stats = LevelStats {
            level: self.level,
            survivor_count: self.count,
            colored_hits: hits,
            points_placed,
            survivors_after: count,
            threshold_met: count as f64 >= self.threshold_base.powi(self.level as i32),
        };
        (
            Frontier {
                level: self.level,
                intervals,
                count,
                mode: self.mode,
                threshold_base: self.threshold_base,
            },
            stats,
        )
    }

    /// Both children of every survivor, one level down.
    pub fn spawn_children(&self) -> Result<Frontier> {
        check_level(self.level + 1)?;
        Ok(Frontier {
            level: self.level + 1,
            intervals: self.intervals.iter().map(|&(a, b)| (2 * a, 2 * b)).collect(),
            count: 2 * self.count,
            mode: self.mode,
            threshold_base: self.threshold_base,
        })
    }

    /// Colors the level with the given points and spawns the next level.
    pub fn color_points(&self, points: &[Wide]) -> Result<(Frontier, LevelStats)> {
        let cells = points
            .iter()
            .map(|w| cell_of(w, self.level))
            .collect::<Result<Vec<_>>>()?;
        let (after, stats) = self.color_cells(&cells, points.len() as u64);
        Ok((after.spawn_children()?, stats))
    }

    /// [`Self::color_points`] for points given as [`UnitPoint`]s.
    pub fn color_level(&self, points: &[UnitPoint]) -> Result<(Frontier, LevelStats)> {
        let wide: Vec<Wide> = points.iter().map(UnitPoint::to_wide).collect();
        self.color_points(&wide)
    }
}

fn check_level(level: u32) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::InvalidInput(format!("tree level {level} exceeds {MAX_LEVEL}")));
    }
    Ok(())
}

/// Dyadic cell of a point at `level`; fails when the enclosure straddles a cell boundary.
pub fn cell_of(w: &Wide, level: u32) -> Result<u64> {
    if level == 0 {
        return Ok(0);
    }
    let shift = 128 - level;
    let lo = w.v >> shift;
    let hi = w.v.wrapping_add(w.rad) >> shift;
    if lo != hi {
        return Err(exhausted(format!("locating a point at tree level {level}"), 128));
    }
    Ok(lo as u64)
}

/// Pushes `[a, b)` reduced modulo `size` (at most one wrap on either side).
fn push_cyclic(out: &mut Vec<(u64, u64)>, a: i128, b: i128, size: u64) {
    let m = size as i128;
    if b - a >= m {
        out.push((0, size));
        return;
    }
    if a < 0 {
        out.push(((a + m) as u64, size));
        out.push((0, b.min(m) as u64));
    } else if b > m {
        out.push((a as u64, size));
        out.push((0, (b - m) as u64));
    } else {
        out.push((a as u64, b as u64));
    }
}

/// Sorts and merges overlapping or adjacent intervals.
pub(crate) fn normalize(mut v: Vec<(u64, u64)>) -> Vec<(u64, u64)> {
    v.retain(|&(a, b)| a < b);
    v.sort_unstable();
    let mut out: Vec<(u64, u64)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

pub(crate) fn measure(v: &[(u64, u64)]) -> u64 {
    v.iter().map(|(a, b)| b - a).sum()
}

pub(crate) fn contains(v: &[(u64, u64)], k: u64) -> bool {
    let i = v.partition_point(|&(_, b)| b <= k);
    i < v.len() && v[i].0 <= k
}

/// `base − removal` for normalized interval lists.
pub(crate) fn subtract(base: &[(u64, u64)], removal: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity(base.len() + removal.len());
    let mut j = 0;
    for &(a, b) in base {
        let mut start = a;
        while j < removal.len() && removal[j].1 <= start {
            j += 1;
        }
        let mut k = j;
        while k < removal.len() && removal[k].0 < b {
            let (ra, rb) = removal[k];
            if ra > start {
                out.push((start, ra));
            }
            start = start.max(rb);
            if rb >= b {
                break;
            }
            k += 1;
        }
        if start < b {
            out.push((start, b));
        }
    }
    out
}

/// `true` when every interval of `inner` lies inside `outer` (both normalized).
pub(crate) fn is_subset(inner: &[(u64, u64)], outer: &[(u64, u64)]) -> bool {
    subtract(inner, outer).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Real;

    #[test]
    fn no_points_doubles_the_frontier() {
        let f = Frontier::full(3, Mode::Plain).unwrap();
        let (next, stats) = f.color_points(&[]).unwrap();
        assert_eq!(next.survivor_count(), 16);
        assert_eq!(stats.survivors_after, 8);
        assert!(stats.recursion_bound_holds(Mode::Plain));
    }

    #[test]
    fn plain_step_removes_the_hit_vertex() {
        let f = Frontier::from_indices(1, &[0, 1], Mode::Plain).unwrap();
        let p = UnitPoint::from_real(&Real::ratio(3, 10), 128).unwrap();
        let (next, stats) = f.color_level(&[p]).unwrap();
        assert_eq!(next.level(), 2);
        assert_eq!(next.indices(), vec![2, 3]);
        assert_eq!(stats.colored_hits, 1);
        assert_eq!(stats.survivors_after, 1);
    }

    #[test]
    fn thick_step_removes_neighbours() {
        let f = Frontier::full(3, Mode::Thick).unwrap();
        let (after, stats) = f.color_cells(&[4], 1);
        assert_eq!(after.indices(), vec![0, 1, 2, 6, 7]);
        assert_eq!(stats.colored_hits, 1);
        assert!(stats.recursion_bound_holds(Mode::Thick));
        // neighbours wrap around the circle
        let (after, _) = f.color_cells(&[0], 1);
        assert_eq!(after.indices(), vec![2, 3, 4, 5, 6]);
        let (after, _) = f.color_cells(&[7], 1);
        assert_eq!(after.indices(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn relevant_cells_in_thick_mode() {
        let f = Frontier::from_indices(3, &[0, 4], Mode::Thick).unwrap();
        assert_eq!(f.relevant_cells(), vec![(0, 2), (3, 6), (7, 8)]);
        let g = Frontier::from_indices(3, &[0, 4], Mode::Plain).unwrap();
        assert_eq!(g.relevant_cells(), vec![(0, 1), (4, 5)]);
    }

    #[test]
    fn children_descend_from_survivors() {
        let f = Frontier::from_indices(4, &[1, 2, 3, 9], Mode::Plain).unwrap();
        let (after, _) = f.color_cells(&[2, 5], 2);
        let next = after.spawn_children().unwrap();
        for i in next.indices() {
            assert!(after.contains(i / 2));
        }
        assert_eq!(next.survivor_count(), 6);
    }

    #[test]
    fn interval_subtraction() {
        let base = vec![(0, 10), (20, 30)];
        assert_eq!(subtract(&base, &[(5, 25)]), vec![(0, 5), (25, 30)]);
        assert_eq!(subtract(&base, &[(0, 1), (2, 3), (29, 40)]), vec![(1, 2), (3, 10), (20, 29)]);
        assert!(subtract(&base, &[(0, 100)]).is_empty());
        assert!(is_subset(&[(1, 2)], &base));
        assert!(!is_subset(&[(9, 11)], &base));
    }

    #[test]
    fn ambiguous_cells_are_reported() {
        let w = Wide { v: (1u128 << 127) - 1, rad: 4 };
        assert!(cell_of(&w, 1).is_err());
        assert_eq!(cell_of(&Wide::exact(1u128 << 127), 1).unwrap(), 1);
    }
}
