//! The randomised covering model with lengths `ℓ_n = ψ(n)/∥nα − γ∥`.

use rand::Rng;

use crate::arith::{CircleOrbit, Psi};
use crate::coverset::{dvoretzky_trial, CoverTrial, LengthSequence};

/// Length rule `ℓ_n = min(1, ψ(n)/∥nα − γ∥)`; a zero distance gives a full arc.
pub fn model_lengths(orbit: &CircleOrbit, psi: &Psi) -> LengthSequence {
    LengthSequence::PsiDriven {
        psi: psi.clone(),
        orbit: orbit.clone(),
    }
}

/// One covering trial of the model with `N` i.i.d. uniform centres.
pub fn random_model_trial<R: Rng + ?Sized>(orbit: &CircleOrbit, psi: &Psi, n: u64, rng: &mut R) -> CoverTrial {
    dvoretzky_trial(&model_lengths(orbit, psi), n, rng, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Real;
    use crate::rng::trial_rng;

    fn golden() -> CircleOrbit {
        CircleOrbit::new(&Real::golden(), &Real::integer(0), 256).unwrap()
    }

    #[test]
    fn zero_psi_never_covers() {
        let t = random_model_trial(&golden(), &Psi::Zero, 1000, &mut trial_rng(3, 0));
        assert_eq!(t.uncovered.measure_f64(), 1.0);
    }

    #[test]
    fn unit_lengths_cover_at_once() {
        // ψ = 1 on every n ≥ 1 exceeds every distance, so ℓ_n is clipped to 1
        let psi = Psi::Power { scale: 1.0, exponent: 0.0 };
        let t = random_model_trial(&golden(), &psi, 1, &mut trial_rng(3, 0));
        assert!(t.uncovered.is_empty());
    }

    #[test]
    fn matches_direct_covering_trial() {
        let psi = Psi::log_power(2.0);
        let a = random_model_trial(&golden(), &psi, 5000, &mut trial_rng(9, 4));
        let b = dvoretzky_trial(&model_lengths(&golden(), &psi), 5000, &mut trial_rng(9, 4), false);
        assert_eq!(a, b);
    }
}
