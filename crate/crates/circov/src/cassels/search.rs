//! Deterministic searches for small products `n·∥nα − γ∥·∥nβ − δ∥`.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{CircleOrbit, DistInterval, Real, UnitPoint};
use crate::error::{exhausted, Error, Result};

/// Largest δ-grid accepted by [`uniform_delta_check`].
pub const MAX_DELTA_GRID: u64 = 1 << 20;

/// Two circle rotations `n ↦ nα − γ` and `n ↦ nβ − δ` up to a horizon.
#[derive(Debug, Clone)]
pub struct CasselsInstance {
    pub first: CircleOrbit,
    pub second: CircleOrbit,
    pub horizon: u64,
}

impl CasselsInstance {
    pub fn new(alpha: &Real, gamma: &Real, beta: &Real, delta: &Real, horizon: u64, precision: u32) -> Result<Self> {
        Self::from_orbits(
            CircleOrbit::new(alpha, gamma, precision)?,
            CircleOrbit::new(beta, delta, precision)?,
            horizon,
        )
    }

    pub fn from_orbits(first: CircleOrbit, second: CircleOrbit, horizon: u64) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::InvalidInput("the horizon N must be at least 2".into()));
        }
        Ok(CasselsInstance { first, second, horizon })
    }
}

/// Midpoint of a distance enclosure, failing if it is not relatively tight.
fn tight_f64(d: DistInterval, what: &str) -> Result<f64> {
    // absolute width above 2^-96 means the working precision ran out
    if d.hi - d.lo > 1u128 << 32 {
        return Err(exhausted(format!("evaluating {what}"), 128));
    }
    Ok(d.mid_f64())
}

/// A record-setting index.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProductRecord {
    pub n: u64,
    pub dist_first: f64,
    pub dist_second: f64,
    /// `n·∥nα − γ∥·∥nβ − δ∥`.
    pub product: f64,
    /// `n·log n·∥nα − γ∥·∥nβ − δ∥`.
    pub normalized: f64,
}

/// Records and minima over `2 ≤ n ≤ N`.
#[derive(Debug, Clone, Serialize)]
pub struct ProductMinima {
    /// Indices where the normalized product strictly drops below all earlier values.
    pub records: Vec<ProductRecord>,
    pub min_normalized: f64,
    /// Minimum of the plain product `n·∥·∥·∥·∥` and where it is attained.
    pub min_product: f64,
    pub argmin_product: u64,
}

/// Scans `2 ≤ n ≤ N` for small (normalized) products.
pub fn product_minima(inst: &CasselsInstance) -> Result<ProductMinima> {
    let mut records = Vec::new();
    let mut best_norm = f64::INFINITY;
    let mut best_prod = f64::INFINITY;
    let mut argmin = 2;
    for n in 2..=inst.horizon {
        let da = inst.first.dist(n);
        let db = inst.second.dist(n);
        // exact zeros need no relative precision
        let a = tight_f64(da, "∥nα − γ∥")?;
        let b = tight_f64(db, "∥nβ − δ∥")?;
        let product = n as f64 * a * b;
        let normalized = product * (n as f64).ln();
        if product < best_prod {
            best_prod = product;
            argmin = n;
        }
        if normalized < best_norm {
            best_norm = normalized;
            records.push(ProductRecord {
                n,
                dist_first: a,
                dist_second: b,
                product,
                normalized,
            });
        }
    }
    Ok(ProductMinima {
        records,
        min_normalized: best_norm,
        min_product: best_prod,
        argmin_product: argmin,
    })
}

/// Best approximation in a block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockBest {
    pub n: u64,
    pub dist: f64,
}

/// The `n ∈ (A, 2A]` minimizing `∥nα − γ∥` (smallest `n` on ties).
pub fn best_inhom_approx(orbit: &CircleOrbit, a: u64) -> Result<BlockBest> {
    if a < 1 {
        return Err(Error::InvalidInput("block start A must be at least 1".into()));
    }
    let mut best: Option<(u64, DistInterval)> = None;
    for n in a + 1..=2 * a {
        let d = orbit.dist(n);
        match best {
            None => best = Some((n, d)),
            Some((_, b)) => {
                if d.hi < b.lo {
                    best = Some((n, d));
                } else if d.lo <= b.hi && d != b && d.lo < b.lo {
                    return Err(exhausted("comparing two block distances", orbit.precision()));
                }
            }
        }
    }
    let (n, d) = best.expect("block is nonempty");
    Ok(BlockBest { n, dist: d.mid_f64() })
}

/// Block minimizers over `(2^k, 2^{k+1}]` for `k = 0 … k_max`.
pub fn inhom_chain(orbit: &CircleOrbit, k_max: u32) -> Result<Vec<BlockBest>> {
    (0..=k_max).map(|k| best_inhom_approx(orbit, 1u64 << k)).collect()
}

/// Per-δ outcome of the uniform check.
#[derive(Debug, Clone, Serialize)]
pub struct UniformDeltaReport {
    pub grid: u64,
    pub horizon: u64,
    pub n_min: u64,
    pub c: f64,
    /// Least qualifying `n` per grid point (`None` = failure).
    pub first_hit: Vec<Option<u64>>,
    pub failures: u64,
    /// Grid index with the largest least `n` (or the first failure).
    pub worst_delta: u64,
    pub worst_n: Option<u64>,
}

impl UniformDeltaReport {
    pub fn passes(&self) -> bool {
        self.failures == 0
    }
}

/// For every `δ = i/m`, the least `n ∈ [n_min, N]` with
/// `n·log n·∥nα − γ∥·∥nβ − δ∥ ≤ C`.
///
/// Each `n` marks the grid points within `C/(n log n ∥nα − γ∥)` of `{nβ}`,
/// so the cost is `O(N + m·Σ radii)`.
pub fn uniform_delta_check(
    orbit: &CircleOrbit,
    beta: &UnitPoint,
    horizon: u64,
    c: f64,
    grid: u64,
    n_min: u64,
) -> Result<UniformDeltaReport> {
    if grid == 0 || grid > MAX_DELTA_GRID {
        return Err(Error::InvalidInput(format!("δ-grid must lie in 1..={MAX_DELTA_GRID}")));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidInput("C must be positive".into()));
    }
    let n_min = n_min.max(2);
    let beta_w = beta.to_wide();
    let m = grid as usize;
    let mut first_hit: Vec<Option<u64>> = vec![None; m];
    let mut remaining = m;
    for n in n_min..=horizon {
        if remaining == 0 {
            break;
        }
        let da = orbit.dist(n);
        let d = tight_f64(da, "∥nα − γ∥")?;
        let radius = if d == 0.0 { 1.0 } else { c / (n as f64 * (n as f64).ln() * d) };
        let center = match beta_w.mul_int(n) {
            Some(w) => w.to_f64(),
            None => return Err(exhausted("forming {nβ}", beta.precision())),
        };
        let mut mark = |i: usize| {
            if first_hit[i].is_none() {
                first_hit[i] = Some(n);
                remaining -= 1;
            }
        };
        if radius >= 0.5 {
            (0..m).for_each(&mut mark);
            continue;
        }
        let lo = ((center - radius) * grid as f64).ceil() as i64;
        let hi = ((center + radius) * grid as f64).floor() as i64;
        for i in lo..=hi {
            mark(i.rem_euclid(grid as i64) as usize);
        }
    }
    let failures = first_hit.iter().filter(|h| h.is_none()).count() as u64;
    let (worst_delta, worst_n) = match first_hit.iter().position(|h| h.is_none()) {
        Some(i) => (i as u64, None),
        None => first_hit
            .iter()
            .enumerate()
            .max_by_key(|(_, h)| h.expect("all hit"))
            .map(|(i, h)| (i as u64, *h))
            .unwrap_or((0, None)),
    };
    Ok(UniformDeltaReport {
        grid,
        horizon,
        n_min,
        c,
        first_hit,
        failures,
        worst_delta,
        worst_n,
    })
}

/// Default lower index for the uniform check: `⌈√N⌉`, so that a hit reflects
/// the asymptotic regime rather than the trivial bound at tiny `n`.
pub fn default_n_min(horizon: u64) -> u64 {
    num_integer::Roots::sqrt(&horizon) + u64::from(num_integer::Roots::sqrt(&horizon).pow(2) < horizon)
}

/// Pass fraction of the uniform check over several `β`.
#[derive(Debug, Clone, Serialize)]
pub struct UniformDeltaSurvey {
    pub betas: Vec<f64>,
    pub passed: Vec<bool>,
    pub failures: Vec<u64>,
    pub worst_delta: Vec<u64>,
    /// Largest least `n` per `β` (`None` when some δ failed).
    pub worst_n: Vec<Option<u64>>,
    pub pass_fraction: f64,
}

/// Runs [`uniform_delta_check`] for each `β` in parallel.
pub fn uniform_delta_survey(
    orbit: &CircleOrbit,
    betas: &[UnitPoint],
    horizon: u64,
    c: f64,
    grid: u64,
    n_min: u64,
) -> Result<UniformDeltaSurvey> {
    let reports: Vec<UniformDeltaReport> = betas
        .par_iter()
        .map(|b| uniform_delta_check(orbit, b, horizon, c, grid, n_min))
        .collect::<Result<_>>()?;
    let passed: Vec<bool> = reports.iter().map(UniformDeltaReport::passes).collect();
    let pass_fraction = passed.iter().filter(|&&p| p).count() as f64 / passed.len().max(1) as f64;
    Ok(UniformDeltaSurvey {
        betas: betas.iter().map(UnitPoint::to_f64).collect(),
        failures: reports.iter().map(|r| r.failures).collect(),
        worst_delta: reports.iter().map(|r| r.worst_delta).collect(),
        worst_n: reports.iter().map(|r| r.worst_n).collect(),
        passed,
        pass_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::DEFAULT_PRECISION;
    use crate::rng::trial_rng;

    fn golden_orbit() -> CircleOrbit {
        let alpha: Real = Real::golden();
        CircleOrbit::new(&alpha, &Real::integer(0), DEFAULT_PRECISION).unwrap()
    }

    #[test]
    fn zero_rotation_gives_zero_products() {
        let z = Real::integer(0);
        let inst = CasselsInstance::new(&z, &z, &Real::ratio(1, 3), &z, 50, 128).unwrap();
        let m = product_minima(&inst).unwrap();
        // 1/3 is enclosed, so multiples of 3 give products at the 2^-128 level
        assert!(m.min_product < 1e-30);
        assert!(m.min_normalized < 1e-30);
        let exact = CasselsInstance::new(&z, &z, &Real::ratio(1, 4), &z, 50, 128).unwrap();
        assert_eq!(product_minima(&exact).unwrap().min_product, 0.0);
        assert!(CasselsInstance::new(&z, &z, &z, &z, 1, 128).is_err());
    }

    #[test]
    fn golden_pair_minimum_on_fibonacci() {
        let alpha: Real = Real::golden();
        let z = Real::integer(0);
        let inst = CasselsInstance::new(&alpha, &z, &alpha, &z, 10_000, 256).unwrap();
        let m = product_minima(&inst).unwrap();
        let fib = [2u64, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987, 1597, 2584, 4181, 6765];
        assert!(fib.contains(&m.argmin_product), "argmin {}", m.argmin_product);
        // brute force agrees
        let mut best = (f64::INFINITY, 0);
        for n in 2..=10_000u64 {
            let v = n as f64 * inst.first.dist_f64(n) * inst.second.dist_f64(n);
            if v < best.0 {
                best = (v, n);
            }
        }
        assert_eq!(best.1, m.argmin_product);
        assert!(m.records.windows(2).all(|w| w[1].normalized < w[0].normalized));
        assert!(m.min_product < 1e-3);
    }

    #[test]
    fn minimum_is_shift_invariant_and_monotone_in_horizon() {
        let alpha: Real = "sqrt(2)".parse().unwrap();
        let g = Real::ratio(1, 7);
        let g1 = Real::ratio(8, 7);
        let b = Real::ratio(2, 9);
        let a = product_minima(&CasselsInstance::new(&alpha, &g, &alpha, &b, 3000, 256).unwrap()).unwrap();
        let c = product_minima(&CasselsInstance::new(&alpha, &g1, &alpha, &b, 3000, 256).unwrap()).unwrap();
        assert_eq!(a.min_normalized, c.min_normalized);
        let longer = product_minima(&CasselsInstance::new(&alpha, &g, &alpha, &b, 6000, 256).unwrap()).unwrap();
        assert!(longer.min_normalized <= a.min_normalized);
    }

    #[test]
    fn block_best_is_fibonacci() {
        let best = best_inhom_approx(&golden_orbit(), 50).unwrap();
        assert_eq!(best.n, 89);
        let rational = CircleOrbit::new(&Real::ratio(3, 7), &Real::integer(0), 128).unwrap();
        let b = best_inhom_approx(&rational, 10).unwrap();
        assert_eq!(b.n, 14);
        assert!(b.dist < 1e-30);
    }

    #[test]
    fn chained_blocks_are_lacunary_and_bounded() {
        let chain = inhom_chain(&golden_orbit(), 20).unwrap();
        for w in chain.windows(2) {
            let r = w[1].n as f64 / w[0].n as f64;
            assert!(r > 1.0 && r < 4.0);
        }
        let shifted = CircleOrbit::new(&Real::golden(), &Real::ratio(1, 3), 256).unwrap();
        for b in inhom_chain(&shifted, 20).unwrap() {
            assert!(b.n as f64 * b.dist <= 8.0, "{b:?}");
        }
    }

    #[test]
    fn huge_constant_passes_immediately() {
        let beta = UnitPoint::random(&mut trial_rng(1, 1), 256).unwrap();
        let n = 1000u64;
        let c = n as f64 * (n as f64).ln() / 4.0;
        let r = uniform_delta_check(&golden_orbit(), &beta, n, c, 100, 2).unwrap();
        assert!(r.passes());
        assert!(r.first_hit.iter().all(|h| h.unwrap() <= 2));
    }

    #[test]
    fn rational_beta_leaves_a_gap() {
        // β = 1/2: ∥nβ − 1/4∥ = 1/4 for every n, and n∥nα∥ stays near 0.45
        let beta = UnitPoint::from_real(&Real::ratio(1, 2), 256).unwrap();
        let r = uniform_delta_check(&golden_orbit(), &beta, 100_000, 0.1, 4, 10).unwrap();
        assert!(!r.passes());
        assert_eq!(r.first_hit[1], None);
        assert_eq!(r.worst_delta, 1);
    }

    #[test]
    fn default_floor_is_ceiling_sqrt() {
        assert_eq!(default_n_min(1_000_000), 1000);
        assert_eq!(default_n_min(1_000_001), 1001);
    }
}
