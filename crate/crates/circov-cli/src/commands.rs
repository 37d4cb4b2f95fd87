//! The subcommands: parameters and execution.

use clap::{Args, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use circov::arith::real::parse_rational;
use circov::arith::{bohr_bracket, bohr_count, BohrQuery, CircleOrbit, Psi, Real, UnitPoint};
use circov::cassels::{
    default_n_min, inhom_chain, model_lengths, product_minima, psi_regime, uniform_delta_survey, CasselsInstance,
    RegimeConfig,
};
use circov::coverset::{expected_uncovered, monte_carlo_uncovered, shepp_terms, LengthSequence};
use circov::limsupdim::{emptiness_profile, estimate_dimension, DigitSet, DimensionPlan};
use circov::rng::{sub_rng, trial_rng};
use circov::sequences::gap::GapThresholds;
use circov::sequences::{
    gap_profile, gcd_sum_trend, generate, local_count_sum, GcdSumHypothesis, IndexRule, LocalCountInstance, Sequence,
    SequenceSpec, SlowFunction, DEFAULT_PAIR_BUDGET,
};
use circov::tree::source::OrbitSource;
use circov::tree::source::PointSource;
use circov::tree::{iid_event_bound, run_tree, CoveringSchedule, Mode, RunConfig, TreeRun};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::report::{RunReport, Table};

/// Stream labels for random draws that are not trial streams.
const PURPOSE_ORBIT_X: u64 = 0x6f72;
const PURPOSE_BETA: u64 = 0x6265;

/// Exact rationals longer than this are left out of summaries.
const MAX_EXACT_CHARS: usize = 2000;

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Classify a length sequence by the covering series.
    Shepp(SheppArgs),
    /// Monte Carlo of the uncovered measure after N random arcs.
    CoverSim(CoverSimArgs),
    /// Colour the dyadic tree with i.i.d. or orbit points.
    TreeRun(TreeRunArgs),
    /// Box-counting dimension of the random limsup set.
    DimEstimate(DimEstimateArgs),
    /// Small inhomogeneous products: records, uniform-in-δ check, block chains.
    CasselsSearch(CasselsArgs),
    /// Bohr-set counts against the two-sided bracket.
    BohrCheck(BohrArgs),
    /// Gcd-sum hypothesis over a grid of N.
    GcdsumCheck(GcdSumArgs),
    /// Weighted local count at one level.
    LocalCount(LocalCountArgs),
    /// Covering/non-covering classification of ψ for the randomised model.
    PsiRegime(PsiRegimeArgs),
    /// Growth profile of a sequence prefix.
    GapProfile(GapArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Shepp(_) => "shepp",
            Command::CoverSim(_) => "cover-sim",
            Command::TreeRun(_) => "tree-run",
            Command::DimEstimate(_) => "dim-estimate",
            Command::CasselsSearch(_) => "cassels-search",
            Command::BohrCheck(_) => "bohr-check",
            Command::GcdsumCheck(_) => "gcdsum-check",
            Command::LocalCount(_) => "local-count",
            Command::PsiRegime(_) => "psi-regime",
            Command::GapProfile(_) => "gap-profile",
        }
    }

    /// Resolved parameters as JSON.
    pub fn params(&self) -> Result<Value> {
        Ok(match self {
            Command::Shepp(a) => serde_json::to_value(a)?,
            Command::CoverSim(a) => serde_json::to_value(a)?,
            Command::TreeRun(a) => serde_json::to_value(a)?,
            Command::DimEstimate(a) => serde_json::to_value(a)?,
            Command::CasselsSearch(a) => serde_json::to_value(a)?,
            Command::BohrCheck(a) => serde_json::to_value(a)?,
            Command::GcdsumCheck(a) => serde_json::to_value(a)?,
            Command::LocalCount(a) => serde_json::to_value(a)?,
            Command::PsiRegime(a) => serde_json::to_value(a)?,
            Command::GapProfile(a) => serde_json::to_value(a)?,
        })
    }

    /// Runs the command under `config`.
    pub fn run(&self, config: &ExperimentConfig) -> Result<RunReport> {
        let (summary, table) = match self {
            Command::Shepp(a) => a.run()?,
            Command::CoverSim(a) => a.run(config)?,
            Command::TreeRun(a) => a.run(config)?,
            Command::DimEstimate(a) => a.run(config)?,
            Command::CasselsSearch(a) => a.run(config)?,
            Command::BohrCheck(a) => a.run(config)?,
            Command::GcdsumCheck(a) => a.run()?,
            Command::LocalCount(a) => a.run(config)?,
            Command::PsiRegime(a) => a.run(config)?,
            Command::GapProfile(a) => a.run(config)?,
        };
        Ok(RunReport::new(config, summary, table))
    }
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn parse_real(s: &str) -> Result<Real> {
    Ok(s.parse::<Real>()?)
}

/// `a..b` (inclusive) or a single value.
fn parse_range(s: &str) -> Result<(u32, u32)> {
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|_| schema(format!("bad level range {s:?}")));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if a > b {
                return Err(schema(format!("empty range {s:?}")));
            }
            Ok((a, b))
        }
        None => {
            let v = parse(s)?;
            Ok((v, v))
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<T>().map_err(|_| schema(format!("bad list entry {t:?} in {s:?}"))))
        .collect()
}

/// `const:c`, `log`, `log:a` or `loglog`.
fn parse_slow(s: &str) -> Result<SlowFunction> {
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    let num = || rest.trim().parse::<f64>().map_err(|_| schema(format!("bad slow function {s:?}")));
    match head.trim() {
        "const" => Ok(SlowFunction::Constant(num()?)),
        "log" if rest.is_empty() => Ok(SlowFunction::Log),
        "log" => Ok(SlowFunction::LogPower(num()?)),
        "loglog" => Ok(SlowFunction::LogLog),
        _ => Err(schema(format!("unknown slow function {s:?} (const:c, log, log:a, loglog)"))),
    }
}

/// Length family from `family` plus an optional constant (`--c`).
fn length_family(family: &str, c: &Option<String>) -> Result<LengthSequence> {
    let text = match c {
        Some(c) if !family.contains(':') => format!("{family}:{c}"),
        Some(_) => return Err(schema("give the constant either in --family or in --c, not both")),
        None => family.to_string(),
    };
    Ok(LengthSequence::parse(&text)?)
}

fn exact_text<T: std::fmt::Display>(v: &Option<T>) -> Value {
    match v.as_ref().map(|r| r.to_string()) {
        Some(text) if text.len() <= MAX_EXACT_CHARS => Value::String(text),
        _ => Value::Null,
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SheppArgs {
    /// `harmonic:c`, `logcorr:p` or `list:l1,l2,…` (or a bare family with --c).
    #[arg(long, default_value = "harmonic:1")]
    pub family: String,
    /// Constant for a bare family name.
    #[arg(long)]
    pub c: Option<String>,
    /// Number of series terms evaluated.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
}

impl SheppArgs {
    fn run(&self) -> Result<(Value, Table)> {
        let lengths = length_family(&self.family, &self.c)?;
        if self.n < 2 {
            return Err(schema("n must be at least 2"));
        }
        let rep = shepp_terms(&lengths, self.n);
        let mut table = Table::new(&["n", "ln_term"]);
        for &(n, t) in &rep.log_terms {
            table.push(vec![json!(n), json!(t)]);
        }
        let summary = json!({
            "verdict": rep.verdict(),
            "closed_form": rep.closed_form,
            "numeric": rep.numeric,
            "fitted_exponent": rep.fitted_exponent,
            "consistent": rep.consistent(),
        });
        Ok((summary, table))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CoverSimArgs {
    #[arg(long, default_value = "harmonic:1/2")]
    pub family: String,
    #[arg(long)]
    pub c: Option<String>,
    /// Number of arcs per trial.
    #[arg(long, default_value_t = 10_000)]
    pub n: u64,
    /// Use the model lengths ψ(n)/∥nα − γ∥ instead of --family.
    #[arg(long)]
    pub psi: Option<String>,
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    #[arg(long, default_value = "0")]
    pub gamma: String,
}

impl CoverSimArgs {
    fn run(&self, config: &ExperimentConfig) -> Result<(Value, Table)> {
        let lengths = match &self.psi {
            Some(p) => {
                let orbit = CircleOrbit::new(&parse_real(&self.alpha)?, &parse_real(&self.gamma)?, config.global.precision_bits)?;
                model_lengths(&orbit, &Psi::parse(p)?)
            }
            None => length_family(&self.family, &self.c)?,
        };
        let s = monte_carlo_uncovered(&lengths, self.n, config.global.trials, config.global.seed);
        let mut table = Table::new(&["trial", "n", "uncovered_measure", "components"]);
        for r in &s.rows {
            table.push(vec![json!(r.trial), json!(r.n), json!(r.uncovered_measure), json!(r.components)]);
        }
        let expected = expected_uncovered(&lengths, self.n);
        let summary = json!({
            "trials": s.trials,
            "mean": s.mean,
            "std_error": s.std_error,
            "expected": s.expected,
            "expected_ln": expected.ln_value,
            "expected_exact": exact_text(&expected.exact),
            "z_score": s.z_score,
        });
        Ok((summary, table))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TreeRunArgs {
    /// `iid` or `orbit`.
    #[arg(long, default_value = "iid")]
    pub source: String,
    /// Schedule mass L (rational).
    #[arg(long = "L", default_value = "1013")]
    pub mass: String,
    /// `plain` or `thick`.
    #[arg(long, default_value = "plain")]
    pub mode: String,
    /// Levels `n0..n_max`.
    #[arg(long, default_value = "8..24")]
    pub levels: String,
    #[arg(long, default_value_t = 1.2)]
    pub threshold_base: f64,
    /// Sequence for orbit points.
    #[arg(long, default_value = "pow2")]
    pub seq: String,
}

impl TreeRunArgs {
    fn run(&self, config: &ExperimentConfig) -> Result<(Value, Table)> {
        let mass = parse_rational(&self.mass)?;
        let schedule = CoveringSchedule::new(mass.clone(), 1)?;
        let mode: Mode = self.mode.parse()?;
        let (n0, n_max) = parse_range(&self.levels)?;
        let mut run_config = RunConfig::new(mode, n0, n_max);
        run_config.threshold_base = self.threshold_base;
        let orbit_spec: Option<SequenceSpec> = match self.source.as_str() {
            "iid" => None,
            "orbit" => Some(self.seq.parse()?),
            other => return Err(schema(format!("unknown point source {other:?} (iid or orbit)"))),
        };
        let max_index = schedule.cutoff(n_max as i64)?;
        let seed = config.global.seed;
        let runs: Vec<TreeRun> = (0..config.global.trials)
            .into_par_iter()
            .map(|t| {
                let mut source = match &orbit_spec {
                    None => PointSource::iid(trial_rng(seed, t)),
                    Some(spec) => {
                        let mut rng = sub_rng(seed, t, PURPOSE_ORBIT_X);
                        PointSource::Orbit(OrbitSource::random(spec.clone(), max_index, &mut rng)?)
                    }
                };
                Ok(run_tree(&mut source, &schedule, &run_config)?)
            })
            .collect::<Result<_>>()?;
        let mut table = Table::new(&[
            "trial",
            "level",
            "survivor_count",
            "colored_hits",
            "points_placed",
            "survivors_after",
            "threshold_met",
        ]);
        for (t, run) in runs.iter().enumerate() {
            for s in &run.stats {
                table.push(vec![
                    json!(t),
                    json!(s.level),
                    json!(s.survivor_count),
                    json!(s.colored_hits),
                    json!(s.points_placed),
                    json!(s.survivors_after),
                    json!(s.threshold_met),
                ]);
            }
        }
        let trials = runs.len().max(1) as f64;
        let extinct = runs.iter().filter(|r| r.extinct()).count();
        let met = runs.iter().filter(|r| r.thresholds_met()).count();
        let bound = (orbit_spec.is_none() && mode == Mode::Plain)
            .then(|| iid_event_bound(n0, n_max - n0, &mass))
            .transpose()?;
        let summary = json!({
            "trials": runs.len(),
            "extinct": extinct,
            "extinction_frequency": extinct as f64 / trials,
            "thresholds_met": met,
            "threshold_frequency": met as f64 / trials,
            "mean_final_survivors": runs.iter().map(|r| r.final_survivors() as f64).sum::<f64>() / trials,
            "iid_event_bound": bound,
        });
        Ok((summary, table))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DimEstimateArgs {
    #[arg(long, default_value = "pow2")]
    pub seq: String,
    /// Shrinking exponent ν of the target radii n^{−ν}.
    #[arg(long, default_value_t = 1)]
    pub nu: u32,
    /// Digit set: `full`, `cantor` or `b:d1,d2,…`.
    #[arg(long = "G", default_value = "full")]
    pub digits: String,
    /// Dyadic depths `a..b`.
    #[arg(long, default_value = "8..18")]
    pub depths: String,
    /// Number of random points x.
    #[arg(long, default_value_t = 8)]
    pub seeds: u64,
    /// Optional tail starts N0 for the emptiness profile, e.g. `256,1024,4096`.
    #[arg(long)]
    pub empty_tails: Option<String>,
}

impl DimEstimateArgs {
    fn run(&self, config: &ExperimentConfig) -> Result<(Value, Table)> {
        let seq: SequenceSpec = self.seq.parse()?;
        let g = DigitSet::parse(&self.digits)?;
        let (a, b) = parse_range(&self.depths)?;
        let plan = DimensionPlan::new(seq, self.nu, (a..=b).collect(), self.seeds, config.global.seed);
        let e = estimate_dimension(&plan, &g)?;
        let mut table = Table::new(&["depth", "log_inverse_scale", "mean_count", "ln_mean_count"]);
        for r in &e.scales {
            let ln = if r.mean_count > 0.0 { json!(r.mean_count.ln()) } else { Value::Null };
            table.push(vec![json!(r.depth), json!(r.log_inverse_scale), json!(r.mean_count), ln]);
        }
        let empty = match &self.empty_tails {
            Some(list) => Some(emptiness_profile(&plan, &g, &parse_list::<u64>(list)?)?),
            None => None,
        };
        let summary = json!({
            "verdict": e.verdict,
            "slope": e.slope,
            "intercept": e.intercept,
            "residual": e.residual,
            "per_seed_slopes": e.per_seed_slopes,
            "spread": e.spread,
            "predicted": e.predicted,
            "emptiness": empty,
        });
        Ok((summary, table))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CasselsArgs {
    /// `uniform`, `minima` or `chain`.
    #[arg(long, default_value = "uniform")]
    pub mode: String,
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    #[arg(long, default_value = "0")]
    pub gamma: String,
    /// A real number, or `random` (one uniform β per trial).
    #[arg(long, default_value = "random")]
    pub beta: String,
    #[arg(long, default_value = "0")]
    pub delta: String,
    /// Horizon N.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    /// Constant C of the uniform check.
    #[arg(long, default_value_t = 10.0)]
    pub c: f64,
    /// δ-grid size m.
    #[arg(long, default_value_t = 1000)]
    pub grid: u64,
    /// Smallest n searched by the uniform check (default ⌈√N⌉).
    #[arg(long)]
    pub n_min: Option<u64>,
    /// Last dyadic block exponent for `chain`.
    #[arg(long, default_value_t = 20)]
    pub k_max: u32,
}

impl CasselsArgs {
    fn betas(&self, config: &ExperimentConfig) -> Result<Vec<UnitPoint>> {
        let prec = config.global.precision_bits;
        if self.beta == "random" {
            (0..config.global.trials.max(1))
                .map(|t| Ok(UnitPoint::random(&mut sub_rng(config.global.seed, t, PURPOSE_BETA), prec)?))
                .collect()
        } else {
            Ok(vec![UnitPoint::from_real(&parse_real(&self.beta)?, prec)?])
        }
    }

    fn run(&self, config: &ExperimentConfig) -> Result<(Value, Table)> {
        let prec = config.global.precision_bits;
        let orbit = CircleOrbit::new(&parse_real(&self.alpha)?, &parse_real(&self.gamma)?, prec)?;
        match self.mode.as_str() {
            "uniform" => {
                let betas = self.betas(config)?;
                let n_min = self.n_min.unwrap_or_else(|| default_n_min(self.n));
                let s = uniform_delta_survey(&orbit, &betas, self.n, self.c, self.grid, n_min)?;
                let mut table = Table::new(&["index", "beta", "passed", "failures", "worst_delta", "worst_n"]);
                for i in 0..betas.len() {
                    table.push(vec![
                        json!(i),
                        json!(s.betas[i]),
                        json!(s.passed[i]),
                        json!(s.failures[i]),
                        json!(s.worst_delta[i] as f64 / self.grid as f64),
                        json!(s.worst_n[i]),
                    ]);
                }
                let summary = json!({ "pass_fraction": s.pass_fraction, "n_min": n_min, "betas": betas.len() });
                Ok((summary, table))
            }
            "minima" => {
                let beta = self.betas(config)?.swap_remove(0);
                let delta = UnitPoint::from_real(&parse_real(&self.delta)?, prec)?;
                let inst = CasselsInstance::from_orbits(orbit, CircleOrbit::from_points(beta.clone(), delta), self.n)?;
                let m = product_minima(&inst)?;
                let mut table = Table::new(&["n", "dist_alpha", "dist_beta", "product", "normalized_product"]);
                for r in &m.records {
                    table.push(vec![json!(r.n), json!(r.dist_first), json!(r.dist_second), json!(r.product), json!(r.normalized)]);
                }
                let summary = json!({
                    "beta": beta.to_f64(),
                    "min_normalized": m.min_normalized,
                    "min_product": m.min_product,
                    "argmin_product": m.argmin_product,
                    "records": m.records.len(),
                });
                Ok((summary, table))
            }
            "chain" => {
                let chain = inhom_chain(&orbit, self.k_max)?;
                let mut table = Table::new(&["k", "n", "dist", "n_times_dist"]);
                for (k, b) in chain.iter().enumerate() {
                    table.push(vec![json!(k), json!(b.n), json!(b.dist), json!(b.n as f64 * b.dist)]);
                }
                let worst = chain.iter().map(|b| b.n as f64 * b.dist).fold(0.0, f64::max);
                Ok((json!({ "max_n_times_dist": worst, "blocks": chain.len() }), table))
            }
            other => Err(schema(format!("unknown mode {other:?} (uniform, minima or chain)"))),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BohrArgs {
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    #[arg(long, default_value = "0")]
    pub gamma: String,
    /// Horizon N.
    #[arg(long, default_value_t = 10_000)]
    pub n: u64,
    /// Radius ε (rational, e.g. `1/100` or `0.01`).
    #[arg(long, default_value = "1/100")]
    pub eps: String,
}

impl BohrArgs {
    fn run(&self, config: &ExperimentConfig) -> Result<(Value, Table)> {
        let eps = parse_rational(&self.eps)?;
        let mut q = BohrQuery::new(parse_real(&self.alpha)?, parse_real(&self.gamma)?, self.n, eps.clone());
        q.precision = config.global.precision_bits;
        let one = parse_rational("1")?;
        let two = parse_rational("2")?;
        let homogeneous = q.homogeneous_scaled(&one);
        let count = bohr_count(&q)?;
        let homogeneous_count = bohr_count(&homogeneous)?;
        let doubled = bohr_count(&q.homogeneous_scaled(&two))?;
        let (bracket, bracket_error) = match bohr_bracket(&homogeneous) {
            Ok(b) => (Some(b), None),
            Err(circov::Error::Precondition(msg)) => (None, Some(msg)),
            Err(e) => return Err(e.into()),
        };
        let holds = bracket.as_ref().map(|b| b.contains(homogeneous_count));
        let mut table = Table::new(&[
            "n",
            "eps",
            "count",
            "homogeneous_count",
            "lower",
            "upper",
            "bracket_holds",
            "doubled_count",
            "shift_inequality_holds",
        ]);
        table.push(vec![
            json!(self.n),
            json!(eps.to_string()),
            json!(count),
            json!(homogeneous_count),
            json!(bracket.as_ref().map(|b| b.lower)),
            json!(bracket.as_ref().map(|b| b.upper.to_string())),
            json!(holds),
            json!(doubled),
            json!(count <= doubled + 1),
        ]);
        let summary = json!({ "bracket": bracket, "bracket_error": bracket_error });
        Ok((summary, table))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GcdSumArgs {
    #[arg(long, default_value = "primepow:2")]
    pub seq: String,
    #[arg(long, default_value_t = 2.0)]
    pub nu: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Window starts N.
    #[arg(long, default_value = "256,512,1024,2048,4096")]
    pub ns: String,
    /// ψ: `const:c`, `log`, `log:a`, `loglog`.
    #[arg(long, default_value = "log:2")]
    pub psi: String,
    /// f, same forms as ψ.
    #[arg(long, default_value = "const:1")]
    pub f: String,
    /// `all`, `primes` or `auto` (primes with f = log for polynomials).
    #[arg(long, default_value = "all")]
    pub index: String,
}

impl GcdSumArgs {
    fn run(&self) -> Result<(Value, Table)> {
        let spec: SequenceSpec = self.seq.parse()?;
        let mut hyp = if self.index == "auto" {
            GcdSumHypothesis::for_spec(&spec, self.nu)
        } else {
            let mut h = GcdSumHypothesis::new(self.nu);
            h.index_rule = match self.index.as_str() {
                "all" => IndexRule::All,
                "primes" => IndexRule::Primes,
                other => return Err(schema(format!("unknown index rule {other:?}"))),
            };
            h.f = parse_slow(&self.f)?;
            h
        };
        hyp.eps = self.eps;
        hyp.psi = parse_slow(&self.psi)?;
        let t = gcd_sum_trend(&spec, &hyp, &parse_list::<u64>(&self.ns)?)?;
        let mut table = Table::new(&["n", "sum", "bound", "ratio", "pairs", "capped_pairs", "index_density", "within_bound"]);
        for p in &t.points {
            table.push(vec![
                json!(p.n),
                json!(p.sum),
                json!(p.bound),
                json!(p.ratio),
                json!(p.pairs),
                json!(p.capped_pairs),
                json!(p.index_density),
                json!(p.within_bound),
            ]);
        }
        Ok((json!({ "growth": t.growth, "bounded": t.bounded, "verdict": t.verdict }), table))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LocalCountArgs {
    #[arg(long, default_value = "lacunary:10")]
    pub seq: String,
    /// Schedule mass L (rational).
    #[arg(long = "L", default_value = "4")]
    pub mass: String,
    /// Level j.
    #[arg(long, default_value_t = 3)]
    pub j: u32,
    /// Shifts B (comma separated rationals).
    #[arg(long, default_value = "0")]
    pub shifts: String,
}

impl LocalCountArgs {
    fn run(&self, config: &ExperimentConfig) -> Result<(Value, Table)> {
        let schedule = CoveringSchedule::new(parse_rational(&self.mass)?, 1)?;
        let end = schedule.block(self.j)?.end;
        let seq = Sequence::new(self.seq.parse()?, end.max(1), config.global.precision_bits)?;
        let mut table =
            Table::new(&["shift", "block_start", "block_end", "sum", "sum_exact", "bound", "holds", "solutions"]);
        let mut all = true;
        for shift in self.shifts.split(',').filter(|s| !s.trim().is_empty()) {
            let inst = LocalCountInstance::new(self.j, parse_rational(shift.trim())?, schedule.clone())?;
            let r = local_count_sum(&inst, &seq, DEFAULT_PAIR_BUDGET)?;
            all &= r.holds;
            table.push(vec![
                json!(shift.trim()),
                json!(r.block_start),
                json!(r.block_end),
                json!(r.sum_f64),
                exact_text(&Some(&r.sum)),
                json!(r.bound),
                json!(r.holds),
                json!(r.solutions),
            ]);
        }
        Ok((json!({ "all_hold": all, "j": self.j }), table))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PsiRegimeArgs {
    #[arg(long, default_value = "golden")]
    pub alpha: String,
    #[arg(long, default_value = "0")]
    pub gamma: String,
    /// `zero`, `power:c:a`, `log:a`, `loglog:a` or `chain:k:a[:c]`.
    #[arg(long, default_value = "loglog:1")]
    pub psi: String,
    /// Block base b.
    #[arg(long, default_value_t = 2)]
    pub b: u64,
    /// Depth L.
    #[arg(long = "L", default_value_t = 12)]
    pub depth: u32,
    #[arg(long, default_value_t = 1 << 22)]
    pub horizon: u64,
    /// Covering constant C.
    #[arg(long = "C", default_value_t = 8.0)]
    pub covering_constant: f64,
    #[arg(long, default_value_t = 0.125)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 64)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 700.0)]
    pub max_lnln: f64,
    /// Make ψ constant on b-adic blocks before bucketing.
    #[arg(long)]
    pub snap: bool,
}

impl PsiRegimeArgs {
    fn run(&self, config: &ExperimentConfig) -> Result<(Value, Table)> {
        let orbit = CircleOrbit::new(&parse_real(&self.alpha)?, &parse_real(&self.gamma)?, config.global.precision_bits)?;
        let cfg = RegimeConfig {
            covering_constant: self.covering_constant,
            epsilon: self.epsilon,
            horizon: self.horizon,
            grid_points: self.grid_points,
            max_lnln: self.max_lnln,
            snap_b_adic: self.snap,
        };
        let d = psi_regime(&orbit, &Psi::parse(&self.psi)?, self.b, self.depth, &cfg)?;
        let mut table = Table::new(&["ell", "size", "capped"]);
        for (i, (&s, &c)) in d.s_ell_sizes.iter().zip(&d.capped).enumerate() {
            table.push(vec![json!(i + 1), json!(s), json!(c)]);
        }
        Ok((serde_json::to_value(&d)?, table))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GapArgs {
    #[arg(long, default_value = "pow2")]
    pub seq: String,
    /// Prefix length.
    #[arg(long, default_value_t = 1000)]
    pub n: u64,
    /// ε of the gap condition q_{n+1}/q_n > 1 + 1/n^{1−ε}.
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
}

impl GapArgs {
    fn run(&self, config: &ExperimentConfig) -> Result<(Value, Table)> {
        let spec: SequenceSpec = self.seq.parse()?;
        let terms = generate(&spec, self.n, config.global.precision_bits)?;
        let thresholds = GapThresholds {
            eps: self.eps,
            ..GapThresholds::default()
        };
        let p = gap_profile(&terms, thresholds)?;
        let mut table = Table::new(&["n", "excess", "phi"]);
        for (i, (e, f)) in p.excess.iter().zip(&p.phi).enumerate() {
            table.push(vec![json!(i + 1), json!(e), json!(f)]);
        }
        let summary = json!({
            "min_scaled_gap": p.min_scaled_gap,
            "tail_min_scaled_gap": p.tail_min_scaled_gap,
            "phi_exponent": p.phi_exponent,
            "min_ratio": p.min_ratio,
            "lacunary": p.lacunary,
            "gap_condition": p.gap_condition,
            "phi_subpolynomial": p.phi_subpolynomial,
            "thresholds": p.thresholds,
        });
        Ok((summary, table))
    }
}
