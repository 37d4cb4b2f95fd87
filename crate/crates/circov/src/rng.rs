//! Deterministic per-trial random streams.
//!
//! Trial `k` of an experiment with master seed `s` draws from the ChaCha8
//! stream `k` keyed by `s`. Streams are counter-based, so adding trials never
//! reshuffles the earlier ones, and results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for all Monte Carlo trials.
pub type TrialRng = ChaCha8Rng;

/// Independent stream for trial `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Independent stream for a (trial, purpose) pair, e.g. to separate `x` from `β`.
pub fn sub_rng(master_seed: u64, trial: u64, purpose: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ purpose.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(trial);
    rng
}
