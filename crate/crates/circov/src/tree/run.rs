//! Level-by-level runs, extinction events and thick-path survival.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use super::frontier::{cell_of, measure, Frontier, LevelStats, Mode, DEFAULT_THRESHOLD_BASE, MAX_LEVEL};
use super::record::ColoringRecord;
use super::schedule::CoveringSchedule;
use super::source::PointSource;
use crate::arith::psi::Neumaier;
use crate::error::{Error, Result};
use crate::rng::{trial_rng, TrialRng};

/// Largest number of i.i.d. points drawn one by one on a level; beyond it
/// (or when points outnumber relevant cells eightfold) only the relevant
/// cells are sampled through binomial splitting.
const DIRECT_SAMPLING_LIMIT: u64 = 1 << 24;

/// Parameters of a tree run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    /// First level; every vertex there starts as a survivor.
    pub n0: u32,
    /// Last level colored.
    pub n_max: u32,
    /// Growth base reported in [`LevelStats::threshold_met`].
    pub threshold_base: f64,
    /// Whether buffer-block points also color (they never do in thick mode).
    pub color_buffers: bool,
    /// Keep the coloring history for path queries.
    pub keep_record: bool,
}

impl RunConfig {
    /// Defaults: buffers color in plain mode only, base 1.2, no record.
    pub fn new(mode: Mode, n0: u32, n_max: u32) -> Self {
        RunConfig {
            mode,
            n0,
            n_max,
            threshold_base: DEFAULT_THRESHOLD_BASE,
            color_buffers: mode == Mode::Plain,
            keep_record: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n0 > self.n_max || self.n_max > MAX_LEVEL {
            return Err(Error::InvalidInput(format!(
                "levels must satisfy n0 ≤ n_max ≤ {MAX_LEVEL} (got {} and {})",
                self.n0, self.n_max
            )));
        }
        if self.mode == Mode::Thick && self.color_buffers {
            return Err(Error::InvalidInput("buffer points never color in thick mode".into()));
        }
        Ok(())
    }
}

/// Statistics of one run.
#[derive(Debug, Clone, Serialize)]
pub struct TreeRun {
    pub config: RunConfig,
    pub stats: Vec<LevelStats>,
    #[serde(skip)]
    pub record: Option<ColoringRecord>,
}

impl TreeRun {
    /// Survivors at `n_max` after its coloring.
    pub fn final_survivors(&self) -> u64 {
        self.stats.last().map_or(0, |s| s.survivors_after)
    }

    /// No uncolored (plain) or thick-uncolored path from `n0` reaches `n_max`.
    pub fn extinct(&self) -> bool {
        self.final_survivors() == 0
    }

    /// Every level met the survivor threshold.
    pub fn thresholds_met(&self) -> bool {
        self.stats.iter().all(|s| s.threshold_met)
    }
}

/// Colors levels `n0 ..= n_max` with points from `source` according to `schedule`.
pub fn run_tree(source: &mut PointSource, schedule: &CoveringSchedule, config: &RunConfig) -> Result<TreeRun> {
    config.validate()?;
    let mut frontier = Frontier::full(config.n0, config.mode)?.with_threshold_base(config.threshold_base);
    let mut stats = Vec::with_capacity((config.n_max - config.n0 + 1) as usize);
    let mut record = config.keep_record.then(ColoringRecord::new);
    for n in config.n0..=config.n_max {
        let block = schedule.block(n)?;
        let (first, last) = if config.color_buffers {
            (block.start + 1, block.end)
        } else {
            (block.buffer_end + 1, block.end)
        };
        let placed = (last + 1).saturating_sub(first);
        let (after, level_stats) = if frontier.is_empty() {
            if let Some(rec) = record.as_mut() {
                rec.push(n, Vec::new(), &[]);
            }
            frontier.apply_coloring(&[], 0, placed)
        } else {
            match source {
                PointSource::Iid(rng) => {
                    let relevant = frontier.relevant_cells();
                    let (cells, hits) = sample_iid_cells(rng, n, placed, &relevant)?;
                    if let Some(rec) = record.as_mut() {
                        rec.push(n, relevant, &cells);
                    }
                    frontier.apply_coloring(&cells, hits, placed)
                }
                PointSource::Orbit(orbit) => {
                    let mut cells = Vec::with_capacity(placed as usize);
                    for idx in first..=last {
                        cells.push(cell_of(&orbit.point(idx)?, n)?);
                    }
                    if let Some(rec) = record.as_mut() {
                        rec.push_complete(n, &cells)?;
                    }
                    frontier.color_cells(&cells, placed)
                }
            }
        };
        stats.push(level_stats);
        frontier = if n < config.n_max { after.spawn_children()? } else { after };
    }
    Ok(TreeRun {
        config: config.clone(),
        stats,
        record,
    })
}

/// Draws `count` uniform points at level `n` and returns the distinct relevant
/// cells they hit together with the number of points landing in relevant cells.
fn sample_iid_cells(rng: &mut TrialRng, n: u32, count: u64, relevant: &[(u64, u64)]) -> Result<(Vec<u64>, u64)> {
    let direct = count <= DIRECT_SAMPLING_LIMIT && count <= measure(relevant).saturating_mul(8);
    sample_iid_cells_with(rng, n, count, relevant, direct)
}

/// [`sample_iid_cells`] with the sampling path chosen by the caller.
fn sample_iid_cells_with(
    rng: &mut TrialRng,
    n: u32,
    count: u64,
    relevant: &[(u64, u64)],
    direct: bool,
) -> Result<(Vec<u64>, u64)> {
    let r = measure(relevant);
    if count == 0 || r == 0 {
        return Ok((Vec::new(), 0));
    }
    if direct {
        let mut cells = Vec::new();
        for _ in 0..count {
            let k = if n == 0 { 0 } else { rng.random::<u64>() >> (64 - n) };
            if super::frontier::contains(relevant, k) {
                cells.push(k);
            }
        }
        let hits = cells.len() as u64;
        cells.sort_unstable();
        cells.dedup();
        return Ok((cells, hits));
    }
    // points in the relevant set, then split them cell by cell
    let size = 1u64 << n;
    let hits = if r == size {
        count
    } else {
        binomial(rng, count, r as f64 / size as f64)?
    };
    let mut remaining_points = hits;
    let mut remaining_cells = r;
    let mut cells = Vec::new();
    'outer: for &(a, b) in relevant {
        for k in a..b {
            if remaining_points == 0 {
                break 'outer;
            }
            let h = if remaining_cells == 1 {
                remaining_points
            } else {
                binomial(rng, remaining_points, 1.0 / remaining_cells as f64)?
            };
            if h > 0 {
                cells.push(k);
                remaining_points -= h;
            }
            remaining_cells -= 1;
        }
    }
    Ok((cells, hits))
}

fn binomial(rng: &mut TrialRng, n: u64, p: f64) -> Result<u64> {
    let dist = Binomial::new(n, p.clamp(0.0, 1.0))
        .map_err(|e| Error::InvalidInput(format!("binomial({n}, {p}): {e}")))?;
    Ok(dist.sample(rng))
}

/// Outcome of a thick-survival trial.
#[derive(Debug, Clone, Serialize)]
pub struct SurvivalOutcome {
    /// `survivors_after(n) ≥ baseⁿ` for every `n0 ≤ n ≤ n_max`.
    pub survived: bool,
    /// First level where the threshold failed.
    pub first_failure: Option<u32>,
    pub stats: Vec<LevelStats>,
}

/// Runs a thick-mode trial and tests the survivor-count threshold on every level.
pub fn thick_survival_trial(
    source: &mut PointSource,
    schedule: &CoveringSchedule,
    n0: u32,
    n_max: u32,
    threshold_base: f64,
) -> Result<SurvivalOutcome> {
    if !(threshold_base > 1.0 && threshold_base < 2.0) {
        return Err(Error::InvalidInput(format!("threshold base {threshold_base} must lie in (1, 2)")));
    }
    let mut config = RunConfig::new(Mode::Thick, n0, n_max);
    config.threshold_base = threshold_base;
    let run = run_tree(source, schedule, &config)?;
    let first_failure = run.stats.iter().find(|s| !s.threshold_met).map(|s| s.level);
    Ok(SurvivalOutcome {
        survived: first_failure.is_none(),
        first_failure,
        stats: run.stats,
    })
}

/// Union bound `2^{n+R+1} ∏_{j=0}^{R} (1 − 2^{−(n+j)})^{⌊L·2^{n+j}⌋}` for i.i.d. points.
#[derive(Debug, Clone, Serialize)]
pub struct EventBound {
    pub n: u32,
    pub r: u32,
    /// Natural logarithm of the bound.
    pub ln_value: f64,
    /// The bound itself (0 when it underflows).
    pub value: f64,
    /// Decimal rendering that survives underflow, e.g. `6.4e-446`.
    pub scientific: String,
}

/// Probability bound for an uncolored path of length `R + 1` starting at level `n`.
pub fn iid_event_bound(n: u32, r: u32, mass: &BigRational) -> Result<EventBound> {
    if mass.is_negative() {
        return Err(Error::InvalidInput("mass L must be nonnegative".into()));
    }
    if n + r > MAX_LEVEL {
        return Err(Error::InvalidInput(format!("levels up to {} exceed {MAX_LEVEL}", n + r)));
    }
    let schedule = (!mass.is_zero()).then(|| CoveringSchedule::new(mass.clone(), 1)).transpose()?;
    let mut sum = Neumaier::default();
    sum.add((n + r + 1) as f64 * std::f64::consts::LN_2);
    for j in 0..=r {
        let level = n + j;
        let count = match &schedule {
            Some(s) => s.level_size(level)?,
            None => 0,
        };
        if count > 0 {
            let factor = if level == 0 {
                f64::NEG_INFINITY
            } else {
                (-(level as f64).exp2().recip()).ln_1p()
            };
            sum.add(count as f64 * factor);
        }
    }
    let ln_value = sum.sum();
    Ok(EventBound {
        n,
        r,
        ln_value,
        value: ln_value.exp(),
        scientific: crate::report::exp_to_sci(ln_value, 4),
    })
}

/// Monte Carlo frequency of the extinction-failure event against its bound.
#[derive(Debug, Clone, Serialize)]
pub struct EventEstimate {
    pub n: u32,
    pub r: u32,
    pub trials: u64,
    pub occurrences: u64,
    pub frequency: f64,
    pub std_error: f64,
    pub bound: EventBound,
    /// `frequency ≤ bound + 4·std_error`.
    pub within_bound: bool,
}

/// Estimates `P(uncolored path of length R+1 from level n)` under i.i.d. points.
pub fn event_frequency(mass: &BigRational, n: u32, r: u32, trials: u64, seed: u64) -> Result<EventEstimate> {
    let schedule = CoveringSchedule::new(mass.clone(), 1)?;
    let config = RunConfig::new(Mode::Plain, n, n + r);
    let outcomes: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut source = PointSource::iid(trial_rng(seed, t));
            run_tree(&mut source, &schedule, &config).map(|run| !run.extinct())
        })
        .collect::<Result<_>>()?;
    let occurrences = outcomes.iter().filter(|&&b| b).count() as u64;
    let (frequency, std_error) = proportion(occurrences, trials);
    let bound = iid_event_bound(n, r, mass)?;
    Ok(EventEstimate {
        n,
        r,
        trials,
        occurrences,
        frequency,
        std_error,
        within_bound: frequency <= bound.value + 4.0 * std_error,
        bound,
    })
}

/// Monte Carlo frequency of thick survival.
#[derive(Debug, Clone, Serialize)]
pub struct SurvivalEstimate {
    pub n0: u32,
    pub n_max: u32,
    pub threshold_base: f64,
    pub trials: u64,
    pub survived: u64,
    pub frequency: f64,
    pub std_error: f64,
}

/// Thick-survival frequency under i.i.d. points.
pub fn survival_frequency(
    schedule: &CoveringSchedule,
    n0: u32,
    n_max: u32,
    threshold_base: f64,
    trials: u64,
    seed: u64,
) -> Result<SurvivalEstimate> {
    let outcomes: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut source = PointSource::iid(trial_rng(seed, t));
            thick_survival_trial(&mut source, schedule, n0, n_max, threshold_base).map(|o| o.survived)
        })
        .collect::<Result<_>>()?;
    let survived = outcomes.iter().filter(|&&b| b).count() as u64;
    let (frequency, std_error) = proportion(survived, trials);
    Ok(SurvivalEstimate {
        n0,
        n_max,
        threshold_base,
        trials,
        survived,
        frequency,
        std_error,
    })
}

fn proportion(k: u64, t: u64) -> (f64, f64) {
    if t == 0 {
        return (0.0, 0.0);
    }
    let p = k as f64 / t as f64;
    (p, (p * (1.0 - p) / t as f64).sqrt())
}

/// Exact rational mass from an integer, for convenience.
pub fn integer_mass(l: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::SequenceSpec;
    use crate::tree::record::uncolored_path_exists;
    use crate::tree::source::OrbitSource;

    #[test]
    fn binomial_splitting_matches_direct_sampling() {
        // 40 points at level 6 with 16 relevant cells out of 64:
        // hits ~ Bin(40, 1/4), distinct cells have mean 16·(1 − (63/64)^40)
        let relevant = [(8u64, 16u64), (40, 48)];
        let reps = 4000;
        let want_cells = 16.0 * (1.0 - (63.0f64 / 64.0).powi(40));
        for direct in [true, false] {
            let mut rng = crate::rng::trial_rng(12, direct as u64);
            let (mut cells_sum, mut hits_sum) = (0.0, 0.0);
            for _ in 0..reps {
                let (cells, hits) = sample_iid_cells_with(&mut rng, 6, 40, &relevant, direct).unwrap();
                assert!(cells.iter().all(|&k| (8..16).contains(&k) || (40..48).contains(&k)));
                assert!(cells.len() as u64 <= hits);
                cells_sum += cells.len() as f64;
                hits_sum += hits as f64;
            }
            let (mean_cells, mean_hits) = (cells_sum / reps as f64, hits_sum / reps as f64);
            assert!((mean_hits - 10.0).abs() < 0.15, "direct = {direct}: mean hits {mean_hits}");
            assert!((mean_cells - want_cells).abs() < 0.15, "direct = {direct}: mean cells {mean_cells}");
        }
    }

    #[test]
    fn event_bound_examples() {
        let zero = iid_event_bound(3, 2, &BigRational::zero()).unwrap();
        assert!((zero.value - 64.0).abs() < 1e-12);
        let b = iid_event_bound(5, 0, &integer_mass(1013)).unwrap();
        let want = 64f64.ln() + 32416.0 * (31.0f64 / 32.0).ln();
        assert!((b.ln_value - want).abs() < 1e-9);
        assert!((b.ln_value - 64f64.ln() + 1029.2).abs() < 0.05);
        let smaller = iid_event_bound(5, 0, &integer_mass(2000)).unwrap();
        assert!(smaller.ln_value < b.ln_value);
    }

    #[test]
    fn large_mass_goes_extinct_immediately() {
        let schedule = CoveringSchedule::simple(1013, 1).unwrap();
        for t in 0..5 {
            let mut src = PointSource::iid(trial_rng(1, t));
            let run = run_tree(&mut src, &schedule, &RunConfig::new(Mode::Plain, 8, 24)).unwrap();
            assert!(run.extinct());
            assert!(run.stats.iter().all(|s| s.recursion_bound_holds(Mode::Plain)));
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let schedule = CoveringSchedule::simple(1, 2).unwrap();
        let config = RunConfig::new(Mode::Plain, 4, 14);
        let a = run_tree(&mut PointSource::iid(trial_rng(5, 2)), &schedule, &config).unwrap();
        let b = run_tree(&mut PointSource::iid(trial_rng(5, 2)), &schedule, &config).unwrap();
        assert_eq!(a.stats, b.stats);
    }

    #[test]
    fn record_agrees_with_frontier() {
        let schedule = CoveringSchedule::simple(1, 1).unwrap();
        let mut config = RunConfig::new(Mode::Plain, 5, 12);
        config.keep_record = true;
        for t in 0..20 {
            let run = run_tree(&mut PointSource::iid(trial_rng(8, t)), &schedule, &config).unwrap();
            let rec = run.record.as_ref().unwrap();
            assert_eq!(uncolored_path_exists(rec, 5, 7).unwrap(), !run.extinct());
        }
    }

    #[test]
    fn thick_recursion_bound_and_small_mass_survival() {
        let schedule = CoveringSchedule::simple(1, 4096).unwrap();
        for t in 0..10 {
            let out = thick_survival_trial(&mut PointSource::iid(trial_rng(2, t)), &schedule, 12, 20, 1.2).unwrap();
            assert!(out.survived);
            assert!(out.stats.iter().all(|s| s.recursion_bound_holds(Mode::Thick)));
        }
        let heavy = CoveringSchedule::simple(1013, 1).unwrap();
        let out = thick_survival_trial(&mut PointSource::iid(trial_rng(2, 0)), &heavy, 8, 12, 1.2).unwrap();
        assert!(!out.survived);
        assert_eq!(out.first_failure, Some(8));
        assert!(thick_survival_trial(&mut PointSource::iid(trial_rng(2, 0)), &heavy, 8, 12, 2.5).is_err());
    }

    #[test]
    fn no_points_always_survive() {
        // L tiny: no level up to 20 receives a point
        let schedule = CoveringSchedule::simple(1, 1 << 30).unwrap();
        let out = thick_survival_trial(&mut PointSource::iid(trial_rng(0, 0)), &schedule, 3, 20, 1.2).unwrap();
        assert!(out.survived);
        assert!(out.stats.iter().all(|s| s.points_placed == 0));
        assert_eq!(out.stats.last().unwrap().survivors_after, 1 << 20);
    }

    #[test]
    fn buffers_are_excluded_in_thick_mode() {
        let schedule = CoveringSchedule::simple(1, 16).unwrap().with_buffers(0.5).unwrap();
        let run = run_tree(&mut PointSource::iid(trial_rng(0, 0)), &schedule, &RunConfig::new(Mode::Thick, 4, 16)).unwrap();
        for s in &run.stats {
            let block = schedule.block(s.level).unwrap();
            assert_eq!(s.points_placed, block.main_len());
            assert_eq!(block.buffer_len(), schedule.buffer_size(s.level).unwrap());
        }
    }

    #[test]
    fn orbit_source_goes_extinct_like_iid() {
        let schedule = CoveringSchedule::simple(1013, 1).unwrap();
        let config = RunConfig::new(Mode::Plain, 4, 8);
        let max_index = schedule.cutoff(8).unwrap();
        let mut rng = trial_rng(4, 0);
        let orbit = OrbitSource::random(SequenceSpec::powers_of_two(), max_index, &mut rng).unwrap();
        let run = run_tree(&mut PointSource::Orbit(orbit), &schedule, &config).unwrap();
        assert!(run.extinct());
    }
}
