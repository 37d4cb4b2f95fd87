//! Exact evaluation of the weighted local count over one tree level.
//!
//! For a level block `Δ_j = (N_{j−1}, N_j]`, frequency cap `H = 2^{2j}` and
//! weights `c(h) = min(1, 2^{j+1}/h)`, the quantity
//!
//! ```text
//! Σ_{ℓ,m ∈ Δ_j} Σ_{1 ≤ h,k ≤ H, |k·q_m − h·q_ℓ − B| < q_{N_{j−1}}/4} c(h)·c(k)
//! ```
//!
//! is computed exactly and compared with `20·N_j·2^j`. For each `(ℓ, m)`
//! the admissible `k` and, for each `k`, the admissible `h` form integer
//! intervals that are solved for directly. All weights are integers after
//! scaling by `lcm(1, …, H)`, so the sum is exact.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::spec::Sequence;
use crate::error::{Error, Result};
use crate::tree::CoveringSchedule;

/// Default budget on the number of `(ℓ, m)` pairs.
pub const DEFAULT_PAIR_BUDGET: u64 = 4_000_000;

/// One level, shift and schedule.
#[derive(Debug, Clone, Serialize)]
pub struct LocalCountInstance {
    pub j: u32,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub shift: BigRational,
    pub schedule: CoveringSchedule,
}

/// Result of [`local_count_sum`].
#[derive(Debug, Clone, Serialize)]
pub struct LocalCountReport {
    pub j: u32,
    /// `N_{j−1}`.
    pub block_start: u64,
    /// `N_j`.
    pub block_end: u64,
    pub frequency_cap: u64,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub sum: BigRational,
    pub sum_f64: f64,
    /// `20·N_j·2^j`.
    pub bound: u64,
    pub holds: bool,
    /// Number of `(ℓ, m, h, k)` solutions.
    pub solutions: u64,
}

impl LocalCountInstance {
    pub fn new(j: u32, shift: BigRational, schedule: CoveringSchedule) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidInput("the level j must be at least 1".into()));
        }
        if j > 20 {
            return Err(Error::InvalidInput("levels above 20 are out of range".into()));
        }
        Ok(Self { j, shift, schedule })
    }

    /// Frequency cap `H = 2^{2j}`.
    pub fn frequency_cap(&self) -> u64 {
        1u64 << (2 * self.j)
    }

    /// `2^{j+1}`: weights equal 1 up to this frequency.
    pub fn weight_knee(&self) -> u64 {
        1u64 << (self.j + 1)
    }
}

/// `lcm(1, …, n)`.
fn lcm_upto(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc.lcm(&BigUint::from(i)))
}

/// Scaled weights `c(h)·lcm` and their prefix sums.
struct Weights {
    scaled: Vec<BigUint>,
    prefix: Vec<BigUint>,
    scale: BigUint,
}

impl Weights {
    fn new(cap: u64, knee: u64) -> Self {
        let scale = lcm_upto(cap);
        let mut scaled = vec![BigUint::zero()];
        let mut prefix = vec![BigUint::zero()];
        for h in 1..=cap {
            let w = if h <= knee {
                scale.clone()
            } else {
                &scale * knee / h
            };
            let p = prefix[h as usize - 1].clone() + &w;
            scaled.push(w);
            prefix.push(p);
        }
        Weights { scaled, prefix, scale }
    }

    /// `Σ_{h=a}^{b} c(h)·lcm` for `1 ≤ a ≤ b ≤ H`.
    fn range(&self, a: u64, b: u64) -> BigUint {
        &self.prefix[b as usize] - &self.prefix[a as usize - 1]
    }
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -Integer::div_floor(&-a, b)
}

/// Clamps an integer into `[lo, hi]`, returning `None` if the result is empty later.
fn clamp(v: BigInt, lo: u64, hi: u64) -> u64 {
    if v < BigInt::from(lo) {
        lo
    } else if v > BigInt::from(hi) {
        hi.saturating_add(1)
    } else {
        v.to_u64().expect("inside the clamp range")
    }
}

/// Exact weighted count for one instance.
pub fn local_count_sum(inst: &LocalCountInstance, seq: &Sequence, pair_budget: u64) -> Result<LocalCountReport> {
    let block = inst.schedule.block(inst.j)?;
    let (start, end) = (block.start, block.end);
    let cap = inst.frequency_cap();
    let knee = inst.weight_knee();
    let bound = 20 * end * (1u64 << inst.j);
    if block.is_empty() {
        return Ok(LocalCountReport {
            j: inst.j,
            block_start: start,
            block_end: end,
            frequency_cap: cap,
            sum: BigRational::zero(),
            sum_f64: 0.0,
            bound,
            holds: true,
            solutions: 0,
        });
    }
    if start == 0 {
        return Err(Error::InvalidInput("the block must start after index 0 (need q_{N_{j−1}})".into()));
    }
    let pairs = block.len() * block.len();
    if pairs > pair_budget {
        return Err(Error::BudgetExceeded(format!(
            "level {} has {} index pairs (budget {pair_budget}); use a smaller schedule mass L",
            inst.j, pairs
        )));
    }
    if end > seq.max_index() {
        return Err(Error::InvalidInput(format!("the sequence must provide terms up to index {end}")));
    }
    let q = |n: u64| -> Result<BigInt> {
        seq.term(n)?
            .to_biguint()
            .map(BigInt::from)
            .ok_or_else(|| Error::InvalidInput("local counts need an integer sequence".into()))
    };
    let terms: Vec<BigInt> = (start + 1..=end).map(q).collect::<Result<_>>()?;
    let big_q = q(start)?;
    let weights = Weights::new(cap, knee);
    // scale everything by 4·B_den: |4d(k q_m − h q_ℓ) − 4·B_num| < d·Q
    let bd = inst.shift.denom().clone();
    let bn4 = inst.shift.numer() * 4;
    let tol = &bd * &big_q;
    let cap_big = BigInt::from(cap);
    let mut total = BigUint::zero();
    let mut solutions = 0u64;
    for q_l in &terms {
        let d = &bd * q_l * 4; // coefficient of h
        for q_m in &terms {
            let e = &bd * q_m * 4; // coefficient of k
            // some h ∈ [1, H] requires D − tol < k·E − 4Bn < D·H + tol
            let k_lo = clamp(Integer::div_floor(&(&d - &tol + &bn4), &e) + 1, 1, cap);
            let k_hi = clamp(ceil_div(&(&d * &cap_big + &tol + &bn4), &e) - 1, 0, cap).min(cap);
            if k_lo > k_hi {
                continue;
            }
            for k in k_lo..=k_hi {
                let x = &e * k - &bn4;
                let h_lo = clamp(Integer::div_floor(&(&x - &tol), &d) + 1, 1, cap);
                let h_hi = clamp(ceil_div(&(&x + &tol), &d) - 1, 0, cap).min(cap);
                if h_lo > h_hi {
                    continue;
                }
                solutions += h_hi - h_lo + 1;
                total += &weights.scaled[k as usize] * weights.range(h_lo, h_hi);
            }
        }
    }
    let denom = &weights.scale * &weights.scale;
    let holds = total <= BigUint::from(bound) * &denom;
    let sum = BigRational::new(total.into(), denom.into());
    Ok(LocalCountReport {
        j: inst.j,
        block_start: start,
        block_end: end,
        frequency_cap: cap,
        sum_f64: sum.to_f64().unwrap_or(f64::NAN),
        sum,
        bound,
        holds,
        solutions,
    })
}

/// Brute-force evaluation over all `(ℓ, m, h, k)`, for cross-checking.
pub fn local_count_brute(inst: &LocalCountInstance, seq: &Sequence) -> Result<(BigRational, u64)> {
    let block = inst.schedule.block(inst.j)?;
    if block.is_empty() {
        return Ok((BigRational::zero(), 0));
    }
    let cap = inst.frequency_cap();
    let knee = BigRational::from_integer(inst.weight_knee().into());
    let c = |h: u64| -> BigRational {
        let v = &knee / BigRational::from_integer(h.into());
        if v > BigRational::one() {
            BigRational::one()
        } else {
            v
        }
    };
    let q = |n: u64| -> Result<BigRational> {
        Ok(BigRational::from_integer(
            seq.term(n)?.to_biguint().map(BigInt::from).ok_or_else(|| {
                Error::InvalidInput("local counts need an integer sequence".into())
            })?,
        ))
    };
    let quarter = q(block.start)? / BigRational::from_integer(4.into());
    let mut sum = BigRational::zero();
    let mut solutions = 0;
    for l in block.start + 1..=block.end {
        let q_l = q(l)?;
        for m in block.start + 1..=block.end {
            let q_m = q(m)?;
            for h in 1..=cap {
                for k in 1..=cap {
                    let v = &q_m * BigRational::from_integer(k.into())
                        - &q_l * BigRational::from_integer(h.into())
                        - &inst.shift;
                    if v.abs() < quarter {
                        sum += c(h) * c(k);
                        solutions += 1;
                    }
                }
            }
        }
    }
    Ok((sum, solutions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::spec::SequenceSpec;

    fn seq(spec: &str, n: u64) -> Sequence {
        Sequence::new(spec.parse::<SequenceSpec>().unwrap(), n, 64).unwrap()
    }

    fn inst(j: u32, b: i64, l: i64) -> LocalCountInstance {
        LocalCountInstance::new(
            j,
            BigRational::from_integer(b.into()),
            CoveringSchedule::simple(l, 1).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn agrees_with_brute_force() {
        for (spec, l, j) in [("lacunary:10", 1, 2), ("lacunary:3", 1, 2), ("lacunary:2", 1, 3), ("square", 1, 2)] {
            let s = seq(spec, 64);
            for b in [0i64, 1, -7, 40, 1000] {
                let i = inst(j, b, l);
                let fast = local_count_sum(&i, &s, DEFAULT_PAIR_BUDGET).unwrap();
                let (slow, count) = local_count_brute(&i, &s).unwrap();
                assert_eq!(fast.sum, slow, "{spec} j={j} B={b}");
                assert_eq!(fast.solutions, count);
            }
        }
    }

    #[test]
    fn fractional_shift_matches_brute_force() {
        let s = seq("lacunary:3", 64);
        let i = LocalCountInstance::new(
            2,
            BigRational::new(17.into(), 4.into()),
            CoveringSchedule::simple(1, 1).unwrap(),
        )
        .unwrap();
        let fast = local_count_sum(&i, &s, DEFAULT_PAIR_BUDGET).unwrap();
        assert_eq!(fast.sum, local_count_brute(&i, &s).unwrap().0);
    }

    #[test]
    fn powers_of_ten_obey_the_bound() {
        let s = seq("lacunary:10", 200);
        let r = local_count_sum(&inst(3, 0, 4), &s, DEFAULT_PAIR_BUDGET).unwrap();
        assert!(r.holds);
        assert_eq!(r.bound, 20 * 60 * 8);
    }

    #[test]
    fn sign_of_shift_is_irrelevant() {
        let s = seq("lacunary:3", 64);
        for b in [5i64, 23, 101] {
            let plus = local_count_sum(&inst(2, b, 1), &s, DEFAULT_PAIR_BUDGET).unwrap();
            let minus = local_count_sum(&inst(2, -b, 1), &s, DEFAULT_PAIR_BUDGET).unwrap();
            assert_eq!(plus.sum, minus.sum);
        }
    }

    #[test]
    fn huge_shift_has_no_solutions() {
        let s = seq("lacunary:10", 200);
        let i = inst(2, 0, 4);
        let block = i.schedule.block(2).unwrap();
        let qmax = num_traits::pow(BigInt::from(10), block.end as usize);
        let shift = qmax * BigInt::from(i.frequency_cap()) * 2;
        let i = LocalCountInstance::new(2, BigRational::from_integer(shift), i.schedule).unwrap();
        let r = local_count_sum(&i, &s, DEFAULT_PAIR_BUDGET).unwrap();
        assert_eq!(r.solutions, 0);
        assert!(r.sum.is_zero());
    }

    #[test]
    fn budget_is_enforced() {
        let s = seq("lacunary:10", 20_000);
        let err = local_count_sum(&inst(2, 0, 1000), &s, 1000).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded(_)));
    }
}
