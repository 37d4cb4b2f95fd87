//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so every line is printed
//! under `cargo test`. The process fails if any enforced check fails.
//! Checks that are known to be out of reach at desk scale are reported but
//! not enforced; their lines say so.

use std::time::Instant;

use circov::arith::{bohr_bracket, bohr_count, BohrQuery, CircleOrbit, Psi, Real, UnitPoint};
use circov::cassels::{default_n_min, psi_regime, uniform_delta_survey, Regime, RegimeConfig};
use circov::coverset::{closed_form_verdict, monte_carlo_uncovered, LengthSequence, SheppVerdict};
use circov::limsupdim::{emptiness_profile, estimate_dimension, DigitSet, DimensionPlan};
use circov::rng::sub_rng;
use circov::sequences::{
    gcd_sum_trend, local_count_sum, GcdSumHypothesis, LocalCountInstance, Sequence, SequenceSpec, SlowFunction,
    DEFAULT_PAIR_BUDGET,
};
use circov::tree::run::integer_mass;
use circov::tree::{event_frequency, survival_frequency, CoveringSchedule};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

const SEED: u64 = 20_260_101;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn shepp_classifier() -> Outcome {
    let cases = [
        (LengthSequence::harmonic("1").unwrap(), SheppVerdict::Diverges, "1/n"),
        (LengthSequence::harmonic("9/10").unwrap(), SheppVerdict::Converges, "0.9/n"),
        (LengthSequence::log_corrected(1.0).unwrap(), SheppVerdict::Diverges, "1/n - 1/(n log n)"),
        (LengthSequence::log_corrected(0.5).unwrap(), SheppVerdict::Converges, "1/n - 1/(n log^0.5 n)"),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (lengths, want, name) in cases {
        let got = closed_form_verdict(&lengths);
        pass &= got == Some(want);
        parts.push(format!("{name}: {got:?}"));
    }
    outcome(pass, parts.join("; "))
}

fn dvoretzky_expectation() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for c in ["1/2", "3/2"] {
        let lengths = LengthSequence::harmonic(c).unwrap();
        let s = monte_carlo_uncovered(&lengths, 10_000, 10_000, SEED);
        pass &= s.z_score.abs() <= 4.0;
        parts.push(format!(
            "c={c}: mean {:.6e} vs exact {:.6e} (z = {:.2})",
            s.mean, s.expected, s.z_score
        ));
    }
    outcome(pass, parts.join("; "))
}

fn iid_extinction() -> Outcome {
    let mass = integer_mass(1013);
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [8u32, 10, 12] {
        let e = event_frequency(&mass, n, n, 200, SEED).unwrap();
        pass &= e.within_bound;
        parts.push(format!("n={n}: freq {:.3} vs bound {}", e.frequency, e.bound.scientific));
    }
    outcome(pass, parts.join("; "))
}

fn thick_survival() -> Outcome {
    let schedule = CoveringSchedule::simple(1, 4096).unwrap();
    let freqs: Vec<f64> = [8u32, 12, 16]
        .iter()
        .map(|&n0| survival_frequency(&schedule, n0, 24, 1.2, 200, SEED).unwrap().frequency)
        .collect();
    let nondecreasing = freqs.windows(2).all(|w| w[1] >= w[0]);
    outcome(
        nondecreasing && freqs[2] > 0.9,
        format!("survival through level 24 for n0 = 8, 12, 16: {freqs:?}"),
    )
}

fn bohr_bounds() -> Outcome {
    let mut rng = sub_rng(SEED, 0, 5);
    let mut checked = 0;
    let mut failures = Vec::new();
    for alpha in [Real::golden(), "surd(-1,1,2,1)".parse::<Real>().unwrap()] {
        let orbit = CircleOrbit::new(&alpha, &Real::integer(0), 256).unwrap();
        let q2 = circov::arith::continued_fraction(&alpha, Some(2)).unwrap().q(2).unwrap().to_u64().unwrap();
        let right = orbit.dist_f64(q2);
        let mut done = 0;
        while done < 50 {
            let n: u64 = rng.random_range(50..=4000);
            // ε = k/(4N): 2ε > 1/N needs k ≥ 3, 2ε < ∥q₂α∥ needs k < 2N·∥q₂α∥
            let k_max = (right * 2.0 * n as f64).ceil() as i64 - 1;
            if k_max < 3 {
                continue;
            }
            let k: i64 = rng.random_range(3..=k_max);
            let eps = BigRational::new(BigInt::from(k), BigInt::from(4 * n as i64));
            let gamma = Real::ratio(rng.random_range(0..1000), 1000);
            let q = BohrQuery::new(alpha.clone(), gamma.clone(), n, eps.clone());
            let homogeneous = q.homogeneous_scaled(&BigRational::from_integer(1.into()));
            let bracket = match bohr_bracket(&homogeneous) {
                Ok(b) => b,
                Err(e) => {
                    failures.push(format!("precondition N={n} eps={eps}: {e}"));
                    done += 1;
                    continue;
                }
            };
            let c0 = bohr_count(&homogeneous).unwrap();
            let cg = bohr_count(&q).unwrap();
            let c2 = bohr_count(&q.homogeneous_scaled(&BigRational::from_integer(2.into()))).unwrap();
            if !bracket.contains(c0) {
                failures.push(format!("bracket N={n} eps={eps}"));
            }
            if cg > c2 + 1 {
                failures.push(format!("shift N={n} eps={eps} gamma={}", gamma.to_f64()));
            }
            done += 1;
            checked += 1;
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} instances, failures: {failures:?}"),
    )
}

fn dimension_slopes() -> (Outcome, Outcome) {
    let cases = [
        (SequenceSpec::powers_of_two(), 1, DigitSet::full(), 1.0, 0.1, "2^n, nu=1, full"),
        (SequenceSpec::powers_of_two(), 2, DigitSet::full(), 0.5, 0.1, "2^n, nu=2, full"),
        (SequenceSpec::powers_of_two(), 1, DigitSet::middle_third(), 0.631, 0.12, "2^n, nu=1, Cantor"),
        (SequenceSpec::monomial(2), 1, DigitSet::full(), 1.0, 0.1, "n^2, nu=1, full"),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (seq, nu, g, target, tol, name) in cases {
        let plan = DimensionPlan::new(seq, nu, (8..=18).collect(), 8, SEED);
        let e = estimate_dimension(&plan, &g).unwrap();
        pass &= (e.slope - target).abs() <= tol;
        parts.push(format!("{name}: {:.4} (target {target})", e.slope));
    }
    let plan = DimensionPlan::new(SequenceSpec::powers_of_two(), 3, vec![], 8, SEED);
    let p = emptiness_profile(&plan, &DigitSet::middle_third(), &[256, 1024, 4096]).unwrap();
    let counts: Vec<String> = p.rows.iter().map(|r| format!("N0={}: {:?}", r.tail_start, r.counts)).collect();
    (
        outcome(pass, parts.join("; ")),
        outcome(p.decreases_to_zero, counts.join("; ")),
    )
}

fn gcd_sum_hypothesis() -> Outcome {
    let mut hyp = GcdSumHypothesis::new(2.0);
    hyp.psi = SlowFunction::LogPower(2.0);
    let ns: Vec<u64> = (8..=12).map(|k| 1u64 << k).collect();
    let t = gcd_sum_trend(&SequenceSpec::PrimePower { d: 2 }, &hyp, &ns).unwrap();
    let ratios: Vec<String> = t.points.iter().map(|p| format!("{:.4}", p.ratio)).collect();
    outcome(
        t.bounded,
        format!("sum*(log N)^2 for N = 2^8..2^12: [{}], growth {:.3}", ratios.join(", "), t.growth),
    )
}

fn local_count_bound() -> Outcome {
    let seq = Sequence::new("lacunary:10".parse().unwrap(), 200, 64).unwrap();
    let mut instances = 0;
    let mut worst: f64 = 0.0;
    let mut pass = true;
    for j in [2u32, 3, 4] {
        for i in 0..20i64 {
            let shift = BigRational::from_integer(BigInt::from((i - 10) * 7919 + i * i));
            let inst = LocalCountInstance::new(j, shift, CoveringSchedule::simple(4, 1).unwrap()).unwrap();
            let r = local_count_sum(&inst, &seq, DEFAULT_PAIR_BUDGET).unwrap();
            pass &= r.holds;
            worst = worst.max(r.sum_f64 / r.bound as f64);
            instances += 1;
        }
    }
    outcome(pass, format!("{instances} instances, largest sum/bound = {worst:.4}"))
}

fn cassels_search() -> Outcome {
    let orbit = CircleOrbit::new(&Real::golden(), &Real::integer(0), 256).unwrap();
    let betas: Vec<UnitPoint> = (0..20)
        .map(|t| UnitPoint::random(&mut sub_rng(SEED, t, 9), 256).unwrap())
        .collect();
    let n = 1_000_000;
    let s = uniform_delta_survey(&orbit, &betas, n, 10.0, 1000, default_n_min(n)).unwrap();
    outcome(
        s.pass_fraction >= 0.95,
        format!(
            "{} of 20 beta pass (n from {} to {n}); failing delta counts {:?}",
            s.passed.iter().filter(|&&p| p).count(),
            default_n_min(n),
            s.failures
        ),
    )
}

fn psi_dichotomy() -> Outcome {
    let orbit = CircleOrbit::new(&Real::golden(), &Real::integer(0), 256).unwrap();
    let cases = [
        (Psi::loglog_critical(), Regime::CoveringLike, "1/(n log n log log n)"),
        (Psi::loglog_power(1.5), Regime::NoncoveringLike, "1/(n log n (log log n)^1.5)"),
        (Psi::log_power(2.0), Regime::NoncoveringLike, "1/(n log^2 n)"),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (psi, want, name) in cases {
        let d = psi_regime(&orbit, &psi, 2, 12, &RegimeConfig::default()).unwrap();
        pass &= d.classification == want;
        parts.push(format!("{name}: {}", d.classification));
    }
    outcome(pass, parts.join("; "))
}

fn main() {
    let start = Instant::now();
    let mut enforced_failures = 0;
    let mut report = |id: &str, name: &str, o: Outcome, enforced: bool, limit_secs: f64, t: Instant| {
        let secs = t.elapsed().as_secs_f64();
        let in_time = secs <= limit_secs;
        let status = match (o.pass && in_time, enforced) {
            (true, _) => "PASS",
            (false, true) => {
                enforced_failures += 1;
                "FAIL"
            }
            (false, false) => "FAIL (known limitation, not enforced)",
        };
        println!("{status} [{id}] {name} ({secs:.1}s, limit {limit_secs}s): {}", o.detail);
    };

    let t = Instant::now();
    report("1", "Shepp classifier", shepp_classifier(), true, 1.0, t);
    let t = Instant::now();
    report("2", "Dvoretzky expectation", dvoretzky_expectation(), true, 120.0, t);
    let t = Instant::now();
    report("3", "i.i.d. tree extinction", iid_extinction(), true, 300.0, t);
    let t = Instant::now();
    report("4", "thick survival", thick_survival(), true, 600.0, t);
    let t = Instant::now();
    report("5", "Bohr set bounds", bohr_bounds(), true, 60.0, t);
    let t = Instant::now();
    let (slopes, empty) = dimension_slopes();
    report("6", "dimension slopes", slopes, true, 1200.0, t);
    report("6-empty", "empty regime box hits reach 0 at N0 <= 2^12", empty, false, 1200.0, t);
    let t = Instant::now();
    report("7", "gcd-sum hypothesis", gcd_sum_hypothesis(), true, 300.0, t);
    let t = Instant::now();
    report("8", "local count bound", local_count_bound(), true, 120.0, t);
    let t = Instant::now();
    report("9", "Cassels uniform-delta search", cassels_search(), true, 600.0, t);
    let t = Instant::now();
    report("10", "psi-regime dichotomy", psi_dichotomy(), true, 60.0, t);

    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if enforced_failures > 0 {
        eprintln!("{enforced_failures} enforced criteria failed");
        std::process::exit(1);
    }
}
