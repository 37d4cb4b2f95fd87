//! Where the points placed on the tree come from.

use rand::Rng;

use crate::arith::{Pow2Reader, UnitPoint, Wide};
use crate::error::Result;
use crate::rng::TrialRng;
use crate::sequences::{Sequence, SequenceSpec, Term};

/// Guard bits kept beyond the size of the largest term.
const GUARD_BITS: u64 = 128;

/// The points `{q_N x}` of a sequence at a fixed `x`.
#[derive(Debug, Clone)]
pub struct OrbitSource {
    sequence: Sequence,
    x: UnitPoint,
    x_wide: Wide,
    pow2: Option<Pow2Reader>,
}

impl OrbitSource {
    /// Orbit of a given point for indices `1 ..= max_index`.
    pub fn new(spec: SequenceSpec, x: UnitPoint, max_index: u64) -> Result<Self> {
        let sequence = Sequence::new(spec, max_index.max(1), x.precision())?;
        let x_wide = x.to_wide();
        let pow2 = x.is_exact().then(|| Pow2Reader::new(&x));
        Ok(OrbitSource {
            sequence,
            x,
            x_wide,
            pow2,
        })
    }

    /// Orbit of a Lebesgue-random point with enough bits for every `{q_N x}`, `N ≤ max_index`.
    pub fn random<R: Rng + ?Sized>(spec: SequenceSpec, max_index: u64, rng: &mut R) -> Result<Self> {
        let probe = Sequence::new(spec.clone(), max_index.max(1), 128)?;
        let top = probe.term(max_index.max(1))?;
        let bits = (top.ln() / std::f64::consts::LN_2).ceil().max(0.0) as u64 + GUARD_BITS;
        let x = UnitPoint::random(rng, bits.max(128) as u32)?;
        Self::new(spec, x, max_index)
    }

    pub fn x(&self) -> &UnitPoint {
        &self.x
    }

    pub fn max_index(&self) -> u64 {
        self.sequence.max_index()
    }

    /// `{q_N x}` as a 128-bit enclosure.
    pub fn point(&self, n: u64) -> Result<Wide> {
        let term = self.sequence.term(n)?;
        match (&term, &self.pow2) {
            (Term::Pow2(k), Some(reader)) => reader.frac(*k),
            (Term::Int(q), _) => match num_traits::ToPrimitive::to_u64(q).and_then(|q| self.x_wide.mul_int(q)) {
                Some(w) if w.rad <= 1u128 << 64 => Ok(w),
                _ => term.frac_mul(&self.x),
            },
            _ => term.frac_mul(&self.x),
        }
    }
}

/// Point source for a tree run.
#[derive(Debug, Clone)]
pub enum PointSource {
    /// Independent uniform points.
    Iid(TrialRng),
    /// Orbit points of a sequence.
    Orbit(OrbitSource),
}

impl PointSource {
    pub fn iid(rng: TrialRng) -> Self {
        PointSource::Iid(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Real;
    use crate::rng::trial_rng;

    #[test]
    fn pow2_orbit_reads_binary_digits() {
        // x = 5/8 = 0.101₂: {2x} = 1/4, {4x} = 1/2
        let x = UnitPoint::from_real(&Real::ratio(5, 8), 256).unwrap();
        let src = OrbitSource::new(SequenceSpec::powers_of_two(), x, 10).unwrap();
        assert_eq!(src.point(1).unwrap().v, 1u128 << 126);
        assert_eq!(src.point(2).unwrap().v, 1u128 << 127);
        assert_eq!(src.point(3).unwrap().v, 0);
    }

    #[test]
    fn random_orbit_matches_generic_path() {
        let mut rng = trial_rng(3, 0);
        let src = OrbitSource::random(SequenceSpec::powers_of_two(), 500, &mut rng).unwrap();
        for n in [1u64, 17, 250, 500] {
            let fast = src.point(n).unwrap();
            let slow = src.x().frac_mul(&(num_bigint::BigUint::from(1u32) << n as usize)).unwrap();
            assert_eq!(fast.v >> 1, slow.v >> 1, "n = {n}");
        }
        let sq = OrbitSource::random(SequenceSpec::monomial(2), 1000, &mut rng).unwrap();
        let w = sq.point(1000).unwrap();
        let slow = sq.x().frac_mul(&num_bigint::BigUint::from(1_000_000u32)).unwrap();
        assert!(w.v.abs_diff(slow.v) <= 1u128 << 65);
    }
}
