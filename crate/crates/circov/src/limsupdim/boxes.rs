//! Cylinder counts of the union of shrinking arcs around an orbit.

use serde::Serialize;

use super::digits::DigitSet;
use crate::arith::{UnitPoint, Wide};
use crate::error::{exhausted, Error, Result};
use crate::sequences::SequenceSpec;
use crate::tree::OrbitSource;

/// A tail window of the limsup set `{δ : ∥δ − qₙx∥ ≤ n^{−ν} for infinitely many n}`.
#[derive(Debug, Clone)]
pub struct LimsupConfig {
    pub seq: SequenceSpec,
    pub x: UnitPoint,
    pub nu: u32,
    /// The window `(N₀, N₁]` of indices whose arcs are used.
    pub tail: (u64, u64),
}

/// Result of one box count.
#[derive(Debug, Clone, Serialize)]
pub struct BoxHits {
    /// Cylinder depth in the base of the digit set.
    pub depth: u32,
    pub tail: (u64, u64),
    pub arcs: u64,
    /// Admissible cylinders meeting at least one arc.
    pub count: u128,
    /// All admissible cylinders at this depth.
    pub admissible: u128,
}

/// Closed arc radius `n^{−ν}` as a 128-bit fixed-point enclosure `[lo, hi]`,
/// or `None` when the arc is the whole circle.
fn radius(n: u64, nu: u32) -> Option<(u128, u128)> {
    let d = (n as u128).checked_pow(nu);
    match d {
        None => Some((0, 1)),
        Some(1) | Some(2) => None,
        Some(d) if d.is_power_of_two() => {
            let r = 1u128 << (128 - d.trailing_zeros());
            Some((r, r))
        }
        Some(d) => {
            let r = u128::MAX / d;
            Some((r, r + 1))
        }
    }
}

/// `⌊p·B / 2^128⌋` for a fraction `p / 2^128` and `B < 2^64`.
fn cylinder_index(p: u128, grid: u64) -> u64 {
    let (ph, pl) = (p >> 64, p & u64::MAX as u128);
    let b = grid as u128;
    ((ph * b + ((pl * b) >> 64)) >> 64) as u64
}

/// Cylinder index of an endpoint known to lie in `[a, a + width]` (mod 1).
fn guarded_index(a: u128, width: u128, grid: u64, depth: u32) -> Result<u64> {
    let lo = cylinder_index(a, grid);
    let hi = cylinder_index(a.wrapping_add(width), grid);
    if lo != hi {
        return Err(exhausted(format!("placing an arc endpoint on the depth-{depth} grid"), 128));
    }
    Ok(lo)
}

/// Inclusive cylinder-index ranges met by the closed arc around `w`.
fn arc_ranges(w: &Wide, r: Option<(u128, u128)>, grid: u64, depth: u32, out: &mut Vec<(u64, u64)>) -> Result<()> {
    let Some((r_lo, r_hi)) = r else {
        out.push((0, grid - 1));
        return Ok(());
    };
    if r_lo >= 1u128 << 127 {
        out.push((0, grid - 1));
        return Ok(());
    }
    // left end in [v − r_hi, v + rad − r_lo], right end in [v + r_lo, v + rad + r_hi]
    let spread = w.rad + (r_hi - r_lo);
    let left = w.v.wrapping_sub(r_hi);
    let right = w.v.wrapping_add(r_lo);
    let wraps_left = w.v < r_hi;
    let wraps_right = w.v.checked_add(r_lo).is_none();
    if wraps_left != (w.v.wrapping_add(w.rad) < r_lo) || wraps_right != w.v.checked_add(w.rad + r_hi).is_none() {
        return Err(exhausted("deciding whether an arc wraps around 0", 128));
    }
    let k_left = guarded_index(left, spread, grid, depth)?;
    let k_right = guarded_index(right, spread, grid, depth)?;
    if wraps_left || wraps_right {
        out.push((k_left, grid - 1));
        out.push((0, k_right));
    } else {
        out.push((k_left, k_right));
    }
    Ok(())
}

/// Counts admissible depth-`depth` cylinders of `G` that meet
/// `⋃_{n ∈ (N₀, N₁]} B({qₙx}, n^{−ν})` (exact).
pub fn box_hits(cfg: &LimsupConfig, g: &DigitSet, depth: u32) -> Result<BoxHits> {
    let (n0, n1) = cfg.tail;
    if n0 < 1 || n0 > n1 {
        return Err(Error::InvalidInput(format!("tail window ({n0}, {n1}] needs 1 ≤ N₀ ≤ N₁")));
    }
    let orbit = OrbitSource::new(cfg.seq.clone(), cfg.x.clone(), n1)?;
    box_hits_with(&orbit, cfg.nu, cfg.tail, g, depth)
}

/// [`box_hits`] on a prepared orbit (reused across depths).
pub fn box_hits_with(orbit: &OrbitSource, nu: u32, tail: (u64, u64), g: &DigitSet, depth: u32) -> Result<BoxHits> {
    if nu == 0 {
        return Err(Error::InvalidInput("ν must be at least 1".into()));
    }
    let grid = g
        .grid_size(depth)
        .filter(|&s| s < u64::MAX)
        .ok_or_else(|| Error::BudgetExceeded(format!("base-{} grid at depth {depth} exceeds 2^64", g.base())))?;
    let (n0, n1) = tail;
    let mut ranges = Vec::with_capacity((n1 - n0) as usize + 1);
    for n in n0 + 1..=n1 {
        let w = orbit.point(n)?;
        arc_ranges(&w, radius(n, nu), grid, depth, &mut ranges)?;
    }
    ranges.sort_unstable();
    let mut count = 0u128;
    let mut current: Option<(u64, u64)> = None;
    for (a, b) in ranges {
        match current {
            Some((ca, cb)) if a <= cb.saturating_add(1) => current = Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                count += g.admissible_in(ca, cb, depth);
                current = Some((a, b));
            }
            None => current = Some((a, b)),
        }
    }
    if let Some((ca, cb)) = current {
        count += g.admissible_in(ca, cb, depth);
    }
    Ok(BoxHits {
        depth,
        tail,
        arcs: n1 - n0,
        count,
        admissible: g.cylinder_count(depth),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Real;
    use crate::rng::trial_rng;

    fn cfg(seq: SequenceSpec, nu: u32, tail: (u64, u64), seed: u64) -> LimsupConfig {
        let x = UnitPoint::random(&mut trial_rng(seed, 0), (tail.1 as u32 + 256).max(512)).unwrap();
        LimsupConfig { seq, x, nu, tail }
    }

    #[test]
    fn radius_rounding() {
        assert_eq!(radius(1, 1), None);
        assert_eq!(radius(2, 1), None);
        assert_eq!(radius(4, 1), Some((1u128 << 126, 1u128 << 126)));
        let (lo, hi) = radius(3, 1).unwrap();
        assert_eq!(hi - lo, 1);
        assert_eq!(cylinder_index(1u128 << 127, 10), 5);
        assert_eq!(cylinder_index(u128::MAX, 7), 6);
    }

    #[test]
    fn big_arcs_hit_everything() {
        let c = cfg(SequenceSpec::powers_of_two(), 1, (1, 3), 1);
        let h = box_hits(&c, &DigitSet::full(), 6).unwrap();
        assert_eq!(h.count, 64);
        let h = box_hits(&c, &DigitSet::middle_third(), 4).unwrap();
        assert_eq!(h.count, 16);
    }

    #[test]
    fn empty_tail_hits_nothing() {
        let c = cfg(SequenceSpec::powers_of_two(), 1, (10, 10), 1);
        assert_eq!(box_hits(&c, &DigitSet::full(), 8).unwrap().count, 0);
    }

    #[test]
    fn single_arc_cylinders() {
        // x = 0: q·x = 0, arc [−1/16, 1/16] on the depth-4 dyadic grid → cells 15, 0, 1
        let x = UnitPoint::from_real(&Real::integer(0), 256).unwrap();
        let c = LimsupConfig {
            seq: SequenceSpec::monomial(1),
            x,
            nu: 1,
            tail: (15, 16),
        };
        assert_eq!(box_hits(&c, &DigitSet::full(), 4).unwrap().count, 3);
    }

    #[test]
    fn monotone_in_tail_and_digit_restriction() {
        let g = DigitSet::middle_third();
        for seed in 0..3 {
            let mut prev = u128::MAX;
            for n0 in [64u64, 128, 256, 512] {
                let c = cfg(SequenceSpec::powers_of_two(), 1, (n0, 1024), seed);
                let h = box_hits(&c, &g, 7).unwrap();
                assert!(h.count <= prev);
                prev = h.count;
                let full = box_hits(&LimsupConfig { ..c.clone() }, &DigitSet::new(3, &[0, 1, 2]).unwrap(), 7).unwrap();
                assert!(full.count >= h.count);
            }
        }
    }
}
