//! Sequence generation and arithmetic diagnostics for `(qₙ)`.

pub mod arithmetic;
pub mod gap;
pub mod gcd;
pub mod local_count;
pub mod spec;
pub mod thin;

pub use arithmetic::{divisor_count, is_prime, primes_up_to, root_count};
pub use gap::{gap_profile, GapProfile, GapThresholds};
pub use gcd::{gcd_sum, gcd_sum_trend, GcdSumHypothesis, GcdSumReport, GcdSumTrend, IndexRule, SlowFunction};
pub use local_count::{local_count_sum, DEFAULT_PAIR_BUDGET, LocalCountInstance, LocalCountReport};
pub use spec::{generate, Sequence, SequenceSpec, Term};
pub use thin::{separate_levels, thin_to_ratio, Separated, Thinned};
