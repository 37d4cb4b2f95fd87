//! Hand-computed values checked against the public API.

use circov::arith::{CircleOrbit, Psi, Real};
use circov::cassels::{best_inhom_approx, model_lengths};
use circov::coverset::{expected_uncovered, monte_carlo_uncovered, shepp_terms, LengthSequence};
use num_rational::BigRational;

#[test]
fn expected_uncovered_is_the_product_of_complements() {
    // (1 − 1/2)(1 − 1/4)(1 − 1/6) = 5/16
    let l = LengthSequence::harmonic("1/2").unwrap();
    let e = expected_uncovered(&l, 3);
    assert_eq!(e.exact, Some(BigRational::new(5.into(), 16.into())));
    assert!((e.value - 0.3125).abs() < 1e-15);
}

#[test]
fn monte_carlo_agrees_with_the_exact_mean() {
    let l = LengthSequence::harmonic("1/2").unwrap();
    let s = monte_carlo_uncovered(&l, 200, 400, 9);
    assert!(s.z_score.abs() < 4.0, "z = {}", s.z_score);
    assert_eq!(s.rows.len(), 400);
}

#[test]
fn harmonic_series_verdicts() {
    // Σ exp(ℓ₁ + … + ℓ_n)/n² converges iff c > 1
    let below = shepp_terms(&LengthSequence::harmonic("1/2").unwrap(), 100_000);
    let above = shepp_terms(&LengthSequence::harmonic("3/2").unwrap(), 100_000);
    assert!(below.consistent() && above.consistent());
    assert_ne!(below.verdict(), above.verdict());
}

#[test]
fn golden_orbit_best_approximations_are_fibonacci() {
    let orbit = CircleOrbit::new(&Real::golden(), &Real::integer(0), 256).unwrap();
    assert_eq!(best_inhom_approx(&orbit, 10).unwrap().n, 13);
    assert_eq!(best_inhom_approx(&orbit, 1000).unwrap().n, 1597);
}

#[test]
fn model_lengths_saturate_near_the_target() {
    // γ = α: ∥1·α − γ∥ = 0, so ℓ₁ = 1 whenever ψ(1) > 0
    let orbit = CircleOrbit::new(&Real::golden(), &Real::golden(), 256).unwrap();
    let l = model_lengths(&orbit, &Psi::parse("power:1:2").unwrap());
    assert_eq!(l.value(1), 1.0);
    assert!(l.value(50) < 1.0);
}
