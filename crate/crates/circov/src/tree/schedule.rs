//! Level cutoffs `N_n` and the main/buffer block partition.
//!
//! Level `n` of the tree receives the points with indices in
//! `(N_{n−1}, N_n]`, where `N_n − N_{n−1} = ⌊L·2^{n/ν}⌋` and `N_{−1} = 0`.
//! With buffers enabled, every level `n ≥ 1` is split into a leading buffer
//! block of `⌊L·2^{(1−ε/2)n}⌋` indices followed by the main block.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};

/// Mass constant, exponent ν and optional buffer parameter of a tree schedule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringSchedule {
    #[serde(serialize_with = "crate::report::ser_rational")]
    mass: BigRational,
    nu: u32,
    buffer_eps: Option<f64>,
}

/// Index ranges of one level; all bounds are 1-based and inclusive on the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelBlock {
    pub level: u32,
    /// `N_{n−1}`: the level holds indices `start + 1 ..= end`.
    pub start: u64,
    /// `N_n`.
    pub end: u64,
    /// Last buffer index; the buffer is `start + 1 ..= buffer_end` (empty if equal to `start`).
    pub buffer_end: u64,
}

impl LevelBlock {
    /// Number of indices on the level.
    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    /// Number of buffer indices.
    pub fn buffer_len(&self) -> u64 {
        self.buffer_end - self.start
    }

    /// Main block `buffer_end + 1 ..= end`.
    pub fn main(&self) -> std::ops::RangeInclusive<u64> {
        self.buffer_end + 1..=self.end
    }

    /// Main block size.
    pub fn main_len(&self) -> u64 {
        self.end - self.buffer_end
    }
}

impl CoveringSchedule {
    /// Schedule with mass `L > 0` and exponent `ν ≥ 1`, without buffers.
    pub fn new(mass: BigRational, nu: u32) -> Result<Self> {
        if !mass.is_positive() {
            return Err(Error::InvalidInput("schedule mass L must be positive".into()));
        }
        if nu == 0 {
            return Err(Error::InvalidInput("schedule exponent ν must be at least 1".into()));
        }
        Ok(Self {
            mass,
            nu,
            buffer_eps: None,
        })
    }

    /// Schedule with `L = num/den` and `ν = 1`.
    pub fn simple(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Self::new(BigRational::new(num.into(), den.into()), 1)
    }

    /// Enables buffer blocks of size `⌊L·2^{(1−ε/2)n}⌋`.
    pub fn with_buffers(mut self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 2.0) {
            return Err(Error::InvalidInput(format!("buffer parameter ε = {eps} must lie in (0, 2)")));
        }
        self.buffer_eps = Some(eps);
        Ok(self)
    }

    pub fn mass(&self) -> &BigRational {
        &self.mass
    }

    pub fn mass_f64(&self) -> f64 {
        self.mass.to_f64().unwrap_or(f64::NAN)
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn buffer_eps(&self) -> Option<f64> {
        self.buffer_eps
    }

    /// `⌊L·2^{n/ν}⌋`, computed exactly.
    pub fn level_size(&self, n: u32) -> Result<u64> {
        // m ≤ (p/q)·2^{n/ν}  ⟺  m^ν·q^ν ≤ p^ν·2^n
        let p = self.mass.numer().to_biguint().expect("positive");
        let q = self.mass.denom().to_biguint().expect("positive");
        let nu = self.nu as usize;
        let top = num_traits::pow(p, nu) << n as usize;
        let bottom = num_traits::pow(q, nu);
        let m = (top / bottom).nth_root(self.nu);
        m.to_u64()
            .ok_or_else(|| Error::BudgetExceeded(format!("level {n} holds more than 2^64 points")))
    }

    /// `N_n` for `n ≥ −1` (with `N_{−1} = 0`).
    pub fn cutoff(&self, n: i64) -> Result<u64> {
        let mut total: u64 = 0;
        for j in 0..=n {
            total = total
                .checked_add(self.level_size(j as u32)?)
                .ok_or_else(|| Error::BudgetExceeded(format!("N_{n} exceeds 2^64")))?;
        }
        Ok(total)
    }

    /// Buffer size `⌊L·2^{(1−ε/2)n}⌋` for `n ≥ 1`, clamped to the level size.
    pub fn buffer_size(&self, n: u32) -> Result<u64> {
        let Some(eps) = self.buffer_eps else {
            return Ok(0);
        };
        if n == 0 {
            return Ok(0);
        }
        let raw = (self.mass_f64() * ((1.0 - eps / 2.0) * n as f64).exp2()).floor();
        Ok((raw as u64).min(self.level_size(n)?))
    }

    /// Index ranges of level `n`.
    pub fn block(&self, n: u32) -> Result<LevelBlock> {
        let start = self.cutoff(n as i64 - 1)?;
        let end = start + self.level_size(n)?;
        Ok(LevelBlock {
            level: n,
            start,
            end,
            buffer_end: start + self.buffer_size(n)?,
        })
    }

    /// Blocks for levels `0..levels`, computed incrementally.
    pub fn blocks(&self, levels: u32) -> Result<Vec<LevelBlock>> {
        let mut out = Vec::with_capacity(levels as usize);
        let mut start = 0u64;
        for n in 0..levels {
            let size = self.level_size(n)?;
            let end = start
                .checked_add(size)
                .ok_or_else(|| Error::BudgetExceeded(format!("N_{n} exceeds 2^64")))?;
            out.push(LevelBlock {
                level: n,
                start,
                end,
                buffer_end: start + self.buffer_size(n)?,
            });
            start = end;
        }
        Ok(out)
    }
}

/// Parses `L` given as an integer, a fraction `a/b`, or a decimal.
pub fn parse_mass(text: &str) -> Result<BigRational> {
    let rational = crate::arith::real::parse_rational(text)?;
    if !rational.is_positive() {
        return Err(Error::InvalidInput("schedule mass L must be positive".into()));
    }
    Ok(rational)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoffs_for_integer_mass() {
        let s = CoveringSchedule::simple(1013, 1).unwrap();
        assert_eq!(s.cutoff(-1).unwrap(), 0);
        assert_eq!(s.cutoff(0).unwrap(), 1013);
        assert_eq!(s.cutoff(2).unwrap(), 1013 * 7);
        assert_eq!(s.level_size(5).unwrap(), 1013 * 32);
    }

    #[test]
    fn small_mass_gives_empty_early_levels() {
        let s = CoveringSchedule::simple(1, 4096).unwrap();
        assert_eq!(s.level_size(11).unwrap(), 0);
        assert_eq!(s.level_size(12).unwrap(), 1);
        assert_eq!(s.level_size(24).unwrap(), 4096);
        assert_eq!(s.cutoff(11).unwrap(), 0);
    }

    #[test]
    fn fractional_exponent_sizes() {
        let s = CoveringSchedule::new(BigRational::from_integer(3.into()), 2).unwrap();
        // ⌊3·2^{n/2}⌋ for n = 0..4: 3, 4, 6, 8, 12
        let sizes: Vec<u64> = (0..5).map(|n| s.level_size(n).unwrap()).collect();
        assert_eq!(sizes, vec![3, 4, 6, 8, 12]);
    }

    #[test]
    fn buffers_partition_each_level() {
        let s = CoveringSchedule::simple(8, 1).unwrap().with_buffers(0.5).unwrap();
        for b in s.blocks(12).unwrap() {
            let expected = if b.level == 0 {
                0
            } else {
                (8.0 * (0.75 * b.level as f64).exp2()).floor() as u64
            };
            assert_eq!(b.buffer_len(), expected);
            assert_eq!(b.buffer_len() + b.main_len(), b.len());
            assert_eq!(b, s.block(b.level).unwrap());
        }
    }
}
