//! Subsequence constructions for lacunary sequences.
//!
//! [`thin_to_ratio`] keeps one term out of every block of `s` consecutive
//! terms, where `s` is the least stride with `r^s > r_target`.
//! [`separate_levels`] then copies whole tree levels and drops a run of
//! terms after each level, so that indices `M < N` on different levels
//! satisfy `q_N ≥ N^100·q_M`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::spec::Term;
use crate::error::{Error, Result};
use crate::tree::CoveringSchedule;

/// Result of [`thin_to_ratio`]: output term `k` (1-based) is input term `k·stride`.
#[derive(Debug, Clone, Serialize)]
pub struct Thinned {
    pub stride: u64,
    /// 1-based indices into the input.
    pub indices: Vec<u64>,
}

/// Checks `q_{n+1} ≥ r·q_n` on the prefix, naming the first offending index.
pub fn check_ratio(terms: &[Term], r: &BigRational, strict: bool, prec: u32) -> Result<()> {
    let (num, den) = ratio_parts(r)?;
    for (i, w) in terms.windows(2).enumerate() {
        let ord = w[1].cmp_scaled(&den, &w[0], &num, prec)?;
        let ok = if strict { ord == Ordering::Greater } else { ord != Ordering::Less };
        if !ok {
            return Err(Error::RatioViolation {
                index: i as u64 + 2,
                detail: format!(
                    "q_{}/q_{} {} {}",
                    i + 2,
                    i + 1,
                    if strict { "is not above" } else { "is below" },
                    r
                ),
            });
        }
    }
    Ok(())
}

fn ratio_parts(r: &BigRational) -> Result<(BigUint, BigUint)> {
    match (r.numer().to_biguint(), r.denom().to_biguint()) {
        (Some(n), Some(d)) if n > d => Ok((n, d)),
        _ => Err(Error::InvalidInput(format!("ratio {r} must exceed 1"))),
    }
}

/// Least `s ≥ 1` with `r^s > target`.
pub fn stride_for(r: &BigRational, target: &BigRational) -> Result<u64> {
    ratio_parts(r)?;
    let mut power = r.clone();
    let mut s = 1u64;
    while &power <= target {
        power *= r;
        s += 1;
    }
    Ok(s)
}

/// Keeps every `s`-th term so that consecutive output ratios exceed `target`.
///
/// `r` is the lacunarity ratio the input is claimed to satisfy; it is
/// verified on the whole prefix before thinning.
pub fn thin_to_ratio(terms: &[Term], r: &BigRational, target: &BigRational, prec: u32) -> Result<Thinned> {
    check_ratio(terms, r, false, prec)?;
    let stride = stride_for(r, target)?;
    let indices: Vec<u64> = (1..)
        .map(|k| k * stride)
        .take_while(|&i| i <= terms.len() as u64)
        .collect();
    let picked: Vec<Term> = indices.iter().map(|&i| terms[(i - 1) as usize].clone()).collect();
    check_ratio(&picked, target, true, prec)?;
    Ok(Thinned { stride, indices })
}

/// One skip performed by [`separate_levels`].
#[derive(Debug, Clone, Serialize)]
pub struct SkipRecord {
    pub level: u32,
    /// 1-based output index of the last term on the level (`N_n`).
    pub after_output: u64,
    /// 1-based input index of the first skipped term.
    pub first_skipped_input: u64,
    pub skipped: u64,
}

/// Output of [`separate_levels`].
#[derive(Debug, Clone, Serialize)]
pub struct Separated {
    /// 1-based input indices of the output terms.
    pub indices: Vec<u64>,
    pub skips: Vec<SkipRecord>,
    /// Number of complete levels built.
    pub levels: u32,
}

/// `⌊100·log₁₀ N⌋`, exact.
pub fn skip_length(n: u64) -> u64 {
    if n <= 1 {
        return 0;
    }
    // largest s with 10^s ≤ N^100
    let target = num_traits::pow(BigUint::from(n), 100);
    let ten = BigUint::from(10u32);
    let mut s = (100.0 * (n as f64).log10()).floor() as u64;
    s = s.saturating_sub(1);
    while num_traits::pow(ten.clone(), (s + 1) as usize) <= target {
        s += 1;
    }
    while s > 0 && num_traits::pow(ten.clone(), s as usize) > target {
        s -= 1;
    }
    s
}

/// Builds the level-separated subsequence for `levels` tree levels and
/// verifies `q_N ≥ N^100·q_M` for every `M ≤ N_n < N` inside the output.
///
/// The input must have consecutive ratios of at least 10. With `levels = 0` the
/// input is returned unchanged.
pub fn separate_levels(terms: &[Term], schedule: &CoveringSchedule, levels: u32, prec: u32) -> Result<Separated> {
    check_ratio(terms, &BigRational::from_integer(10.into()), false, prec)?;
    if levels == 0 {
        return Ok(Separated {
            indices: (1..=terms.len() as u64).collect(),
            skips: Vec::new(),
            levels: 0,
        });
    }
    let mut indices = Vec::new();
    let mut skips = Vec::new();
    let mut next_input = 1u64;
    let available = terms.len() as u64;
    for block in schedule.blocks(levels)? {
        let size = block.len();
        if next_input - 1 + size > available {
            return Err(Error::InvalidInput(format!(
                "level {} needs input terms up to index {}, only {available} supplied",
                block.level,
                next_input - 1 + size
            )));
        }
        indices.extend(next_input..next_input + size);
        next_input += size;
        let skipped = skip_length(block.end);
        skips.push(SkipRecord {
            level: block.level,
            after_output: block.end,
            first_skipped_input: next_input,
            skipped,
        });
        next_input += skipped;
    }
    verify_separation(terms, &indices, schedule, levels, prec)?;
    Ok(Separated { indices, skips, levels })
}

/// Checks `b_N ≥ N^100·b_M` with `M` the last index of the previous level.
///
/// Since `b` is increasing, the last index of the previous levels is the
/// hardest `M` for every `N`, so this covers all pairs.
pub fn verify_separation(
    terms: &[Term],
    indices: &[u64],
    schedule: &CoveringSchedule,
    levels: u32,
    prec: u32,
) -> Result<()> {
    let one = BigUint::one();
    for block in schedule.blocks(levels)?.iter().skip(1) {
        let m = block.start;
        if m == 0 {
            continue;
        }
        let b_m = &terms[(indices[(m - 1) as usize] - 1) as usize];
        for n in block.start + 1..=block.end.min(indices.len() as u64) {
            let b_n = &terms[(indices[(n - 1) as usize] - 1) as usize];
            let scale = num_traits::pow(BigUint::from(n), 100);
            if b_n.cmp_scaled(&one, b_m, &scale, prec)? == Ordering::Less {
                return Err(Error::VerificationFailed {
                    m,
                    n,
                    detail: format!("b_{n}/b_{m} < {n}^100"),
                });
            }
        }
    }
    Ok(())
}

/// Smallest ratio `q_{n+1}/q_n` on a prefix, as a float, for reports.
pub fn min_ratio(terms: &[Term]) -> Option<f64> {
    terms
        .windows(2)
        .map(|w| (w[1].ln() - w[0].ln()).exp())
        .min_by(|a, b| a.total_cmp(b))
        .filter(|v| v.is_finite())
}
