//! Digit-restricted Cantor sets and their grid counts.

use serde::Serialize;

use crate::error::{Error, Result};

/// Points of `[0, 1]` whose base-`b` expansion uses only digits from `D`.
///
/// Its dimension is `s = ln|D| / ln b`; the set is Ahlfors `s`-regular.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigitSet {
    base: u32,
    digits: Vec<u32>,
}

impl DigitSet {
    pub fn new(base: u32, digits: &[u32]) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidInput("digit-set base must be at least 2".into()));
        }
        let mut d: Vec<u32> = digits.to_vec();
        d.sort_unstable();
        d.dedup();
        if d.is_empty() || d.iter().any(|&x| x >= base) {
            return Err(Error::InvalidInput(format!(
                "digits must be a nonempty subset of 0..{base}, got {digits:?}"
            )));
        }
        Ok(DigitSet { base, digits: d })
    }

    /// The whole unit interval (base 2, all digits).
    pub fn full() -> Self {
        DigitSet {
            base: 2,
            digits: vec![0, 1],
        }
    }

    /// Middle-third Cantor set.
    pub fn middle_third() -> Self {
        DigitSet {
            base: 3,
            digits: vec![0, 2],
        }
    }

    /// Parses `full` or `b:d1,d2,…` (e.g. `3:0,2`).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "full" {
            return Ok(Self::full());
        }
        if s == "cantor" {
            return Ok(Self::middle_third());
        }
        let (b, d) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("digit set {s:?} is not of the form b:d1,d2,…")))?;
        let base = b
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad base in {s:?}")))?;
        let digits = d
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::InvalidInput(format!("bad digit list in {s:?}")))?;
        Self::new(base, &digits)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// `true` when every digit is allowed.
    pub fn is_full(&self) -> bool {
        self.digits.len() == self.base as usize
    }

    /// Similarity dimension `ln|D| / ln b`.
    pub fn dimension(&self) -> f64 {
        (self.digits.len() as f64).ln() / (self.base as f64).ln()
    }

    fn allows(&self, d: u32) -> bool {
        self.digits.binary_search(&d).is_ok()
    }

    /// `b^m`, if it fits in a `u64`.
    pub fn grid_size(&self, m: u32) -> Option<u64> {
        (self.base as u64).checked_pow(m)
    }

    /// Number of admissible depth-`m` cylinders, `|D|^m`.
    pub fn cylinder_count(&self, m: u32) -> u128 {
        (self.digits.len() as u128).pow(m)
    }

    /// `true` when the depth-`m` cylinder `[k/b^m, (k+1)/b^m)` has all digits in `D`.
    pub fn cylinder_admissible(&self, k: u64, m: u32) -> bool {
        let mut k = k;
        for _ in 0..m {
            if !self.allows((k % self.base as u64) as u32) {
                return false;
            }
            k /= self.base as u64;
        }
        k == 0
    }

    /// Number of admissible depth-`m` cylinder indices `< k` (for `k ≤ b^m`).
    pub fn admissible_below(&self, k: u64, m: u32) -> u128 {
        let b = self.base as u64;
        let total = self.grid_size(m).expect("grid fits in u64");
        if k >= total {
            return self.cylinder_count(m);
        }
        let nd = self.digits.len() as u128;
        let mut acc = 0u128;
        let mut place = total / b;
        let mut rest = k;
        for i in 0..m {
            let d = (rest / place) as u32;
            rest %= place;
            let smaller = self.digits.partition_point(|&x| x < d) as u128;
            acc += smaller * nd.pow(m - 1 - i);
            if !self.allows(d) {
                return acc;
            }
            place = (place / b).max(1);
        }
        acc
    }

    /// Admissible depth-`m` cylinders with index in `lo ..= hi`.
    pub fn admissible_in(&self, lo: u64, hi: u64, m: u32) -> u128 {
        if lo > hi {
            return 0;
        }
        self.admissible_below(hi.saturating_add(1), m) - self.admissible_below(lo, m)
    }

    /// Membership of `x = mantissa / 2^bits` at depth `j`: the first `j`
    /// base-`b` digits all lie in `D`. Exact.
    pub fn prefix_in_set(&self, mantissa: &num_bigint::BigUint, bits: u32, j: u32) -> bool {
        let scaled = mantissa * num_bigint::BigUint::from(self.base).pow(j);
        let k = scaled >> bits as usize;
        let k = num_traits::ToPrimitive::to_u64(&k).unwrap_or(u64::MAX);
        self.grid_size(j).is_some() && self.cylinder_admissible(k, j)
    }
}

/// Dyadic grid count of a digit set.
#[derive(Debug, Clone, Serialize)]
pub struct FrostmanCount {
    pub depth: u32,
    /// Dyadic intervals `[k/2ⁿ, (k+1)/2ⁿ)` meeting the set.
    pub count: u64,
    /// `count / 2^{s·n}`.
    pub ratio: f64,
}

/// Counts the depth-`n` dyadic intervals that meet `G` (exact).
///
/// Cylinders of `G` are refined only while the extreme points of `G` inside
/// them lie more than one dyadic cell apart; those extreme points belong to
/// `G`, so the cells containing them are always met.
pub fn frostman_grid(g: &DigitSet, n: u32) -> Result<FrostmanCount> {
    if n > 40 {
        return Err(Error::BudgetExceeded(format!("dyadic depth {n} exceeds 40")));
    }
    let b = g.base as u128;
    let dmin = *g.digits.first().expect("nonempty") as u128;
    let dmax = *g.digits.last().expect("nonempty") as u128;
    let mut cells: Vec<u64> = Vec::new();
    // cylinder: left end c / b^m; G ∩ cylinder spans
    // [(c(b−1) + dmin) / ((b−1) b^m), (c(b−1) + dmax) / ((b−1) b^m)]
    let mut stack: Vec<(u128, u32)> = vec![(0, 0)];
    while let Some((c, m)) = stack.pop() {
        let scale = b.pow(m);
        let den = (b - 1) * scale;
        let lo = (c * (b - 1) + dmin) << n;
        let hi = (c * (b - 1) + dmax) << n;
        let (klo, khi) = ((lo / den) as u64, (hi / den) as u64);
        let khi = khi.min((1u64 << n) - 1);
        if khi <= klo + 1 {
            cells.push(klo);
            cells.push(khi);
            continue;
        }
        for &d in &g.digits {
            stack.push((c * b + d as u128, m + 1));
        }
    }
    cells.sort_unstable();
    cells.dedup();
    let count = cells.len() as u64;
    Ok(FrostmanCount {
        depth: n,
        count,
        ratio: count as f64 / (g.dimension() * n as f64).exp2(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(DigitSet::full().dimension(), 1.0);
        assert!((DigitSet::middle_third().dimension() - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        assert!(DigitSet::new(3, &[]).is_err());
        assert!(DigitSet::new(3, &[3]).is_err());
        assert_eq!(DigitSet::parse("3:0,2").unwrap(), DigitSet::middle_third());
    }

    #[test]
    fn admissible_counting_matches_enumeration() {
        let g = DigitSet::new(5, &[0, 2, 3]).unwrap();
        let m = 4;
        let total = g.grid_size(m).unwrap();
        let mut below = 0u128;
        for k in 0..total {
            assert_eq!(g.admissible_below(k, m), below, "k = {k}");
            if g.cylinder_admissible(k, m) {
                below += 1;
            }
        }
        assert_eq!(g.admissible_below(total, m), g.cylinder_count(m));
        assert_eq!(g.admissible_in(0, total - 1, m), 81);
    }

    #[test]
    fn frostman_counts() {
        for n in 0..12 {
            assert_eq!(frostman_grid(&DigitSet::full(), n).unwrap().count, 1 << n);
        }
        let c = DigitSet::middle_third();
        for n in 4..=20 {
            let f = frostman_grid(&c, n).unwrap();
            assert!((0.125..=8.0).contains(&f.ratio), "n = {n}: {f:?}");
        }
        // depth 1: [0, 1/2) and [1/2, 1) both meet the Cantor set
        assert_eq!(frostman_grid(&c, 1).unwrap().count, 2);
    }

    #[test]
    fn frostman_matches_brute_force() {
        // brute force: a dyadic cell meets G iff some fine G-cylinder endpoint lies in it
        let g = DigitSet::new(4, &[1, 3]).unwrap();
        let n = 7;
        let m = 12u32; // 4^12 ≫ 2^7
        let mut brute = std::collections::BTreeSet::new();
        let total = g.grid_size(m).unwrap() as u128;
        for k in 0..total as u64 {
            if g.cylinder_admissible(k, m) {
                // the cylinder's points of G span [k + 1/3, k + 1] / 4^m
                let lo = ((3 * k as u128 + 1) << n) / (3 * total);
                let hi = ((3 * k as u128 + 3) << n) / (3 * total);
                brute.insert(lo as u64);
                brute.insert((hi as u64).min((1 << n) - 1));
            }
        }
        assert_eq!(frostman_grid(&g, n).unwrap().count, brute.len() as u64);
    }

    #[test]
    fn prefix_membership() {
        let c = DigitSet::middle_third();
        // 62/81 = 0.2022₃ → first three digits in {0,2}
        let x = crate::arith::UnitPoint::from_real(&crate::arith::Real::ratio(62, 81), 256).unwrap();
        assert!(c.prefix_in_set(x.mantissa(), 256, 3));
        let y = crate::arith::UnitPoint::from_real(&crate::arith::Real::ratio(1, 2), 256).unwrap();
        assert!(!c.prefix_in_set(y.mantissa(), 256, 1));
    }
}
