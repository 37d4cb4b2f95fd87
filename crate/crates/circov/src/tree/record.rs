//! Run-length coloring history and uncolored-path queries.

use std::collections::BTreeMap;

use serde::Serialize;

use super::frontier::{is_subset, normalize, subtract, MAX_LEVEL};
use crate::error::{Error, Result};

/// Coloring of one level, as run-length interval lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelColoring {
    /// Vertices whose color status is known.
    pub observed: Vec<(u64, u64)>,
    /// Colored vertices among the observed ones.
    pub colored: Vec<(u64, u64)>,
}

/// Coloring history of a window of levels.
///
/// Runs that sample only the points relevant to the current frontier
/// record the coloring of those vertices alone; queries that would need
/// an unobserved vertex fail instead of guessing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ColoringRecord {
    levels: BTreeMap<u32, LevelColoring>,
}

impl ColoringRecord {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a fully observed level with the given colored vertices.
    pub fn push_complete(&mut self, level: u32, colored: &[u64]) -> Result<()> {
        if level > MAX_LEVEL {
            return Err(Error::InvalidInput(format!("tree level {level} exceeds {MAX_LEVEL}")));
        }
        self.push(level, vec![(0, 1u64 << level)], colored);
        Ok(())
    }

    /// Records a level where only `observed` vertices are known.
    pub fn push(&mut self, level: u32, observed: Vec<(u64, u64)>, colored: &[u64]) {
        let observed = normalize(observed);
        let colored = normalize(colored.iter().map(|&k| (k, k + 1)).collect());
        self.levels.insert(level, LevelColoring { observed, colored });
    }

    pub fn level(&self, level: u32) -> Option<&LevelColoring> {
        self.levels.get(&level)
    }

    /// Levels present in the record.
    pub fn levels(&self) -> impl Iterator<Item = u32> + '_ {
        self.levels.keys().copied()
    }

    /// Compact text dump: one line per level, `level: a-b a-b … | colored runs`.
    pub fn to_rle_text(&self) -> String {
        let runs = |v: &[(u64, u64)]| {
            v.iter()
                .map(|(a, b)| format!("{a}-{b}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        self.levels
            .iter()
            .map(|(l, c)| format!("{l}: {} | {}\n", runs(&c.observed), runs(&c.colored)))
            .collect()
    }
}

/// `true` iff some vertex at level `n` starts an all-uncolored descending
/// chain through levels `n ..= n + R`.
pub fn uncolored_path_exists(record: &ColoringRecord, n: u32, r: u32) -> Result<bool> {
    if n + r > MAX_LEVEL {
        return Err(Error::InvalidInput(format!("levels up to {} exceed {MAX_LEVEL}", n + r)));
    }
    let mut alive: Vec<(u64, u64)> = vec![(0, 1u64 << n)];
    for level in n..=n + r {
        let coloring = record.level(level).ok_or_else(|| {
            Error::Precondition(format!(
                "coloring record lacks level {level} (window {n}..={} requested)",
                n + r
            ))
        })?;
        if !is_subset(&alive, &coloring.observed) {
            return Err(Error::Precondition(format!(
                "coloring of level {level} was not observed on every candidate vertex"
            )));
        }
        alive = subtract(&alive, &coloring.colored);
        if alive.is_empty() {
            return Ok(false);
        }
        if level < n + r {
            alive = alive.iter().map(|&(a, b)| (2 * a, 2 * b)).collect();
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fully_colored_root_level_has_no_path() {
        let mut rec = ColoringRecord::new();
        rec.push_complete(2, &[0, 1, 2, 3]).unwrap();
        rec.push_complete(3, &[]).unwrap();
        assert!(!uncolored_path_exists(&rec, 2, 1).unwrap());
    }

    #[test]
    fn empty_levels_leave_paths() {
        let mut rec = ColoringRecord::new();
        for l in 3..=6 {
            rec.push_complete(l, &[]).unwrap();
        }
        assert!(uncolored_path_exists(&rec, 3, 3).unwrap());
    }

    #[test]
    fn single_point_per_level() {
        // one colored vertex per level cannot kill 2ⁿ > R + 1 root subtrees
        for n in 1..=4u32 {
            for r in 0..6u32 {
                let mut rec = ColoringRecord::new();
                for j in 0..=r {
                    let level = n + j;
                    // always hit the leftmost descendant of a different root
                    let root = (j as u64) % (1 << n);
                    rec.push_complete(level, &[root << j]).unwrap();
                }
                let exists = uncolored_path_exists(&rec, n, r).unwrap();
                if (1u64 << n) > (r as u64 + 1) {
                    assert!(exists, "n = {n}, R = {r}");
                }
            }
        }
    }

    #[test]
    fn killing_every_subtree_removes_the_paths() {
        // level 1 roots {0, 1}: color vertex 0 at level 1, then both children of 1
        let mut rec = ColoringRecord::new();
        rec.push_complete(1, &[0]).unwrap();
        rec.push_complete(2, &[2, 3]).unwrap();
        assert!(!uncolored_path_exists(&rec, 1, 1).unwrap());
        assert!(uncolored_path_exists(&rec, 1, 0).unwrap());
    }

    #[test]
    fn short_or_partial_records_are_rejected() {
        let mut rec = ColoringRecord::new();
        rec.push_complete(2, &[]).unwrap();
        assert!(matches!(uncolored_path_exists(&rec, 2, 1), Err(Error::Precondition(_))));
        rec.push(3, vec![(0, 2)], &[]);
        assert!(matches!(uncolored_path_exists(&rec, 2, 1), Err(Error::Precondition(_))));
        assert!(rec.to_rle_text().contains("3: 0-2 | "));
    }
}
