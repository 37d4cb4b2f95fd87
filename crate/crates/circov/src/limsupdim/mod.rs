//! Dimension of limsup sets of shrinking arcs around a sequence orbit,
//! restricted to digit Cantor sets.
//!
//! For a lacunary or polynomial sequence `(qₙ)`, Lebesgue-almost every `x`,
//! and an Ahlfors `s`-regular set `G`, the set of `δ ∈ G` lying within
//! `n^{−ν}` of `{qₙx}` for infinitely many `n` has dimension
//! `1/ν + s − 1` when this is nonnegative, and is empty otherwise. Here the
//! limsup is replaced by a finite tail of indices and the dimension by a
//! box-counting regression.

pub mod boxes;
pub mod digits;
pub mod estimate;

pub use boxes::{box_hits, box_hits_with, BoxHits, LimsupConfig};
pub use digits::{frostman_grid, DigitSet, FrostmanCount};
pub use estimate::{
    coupled_tail_start, cylinder_depth, emptiness_profile, estimate_dimension, predicted_dimension, DimensionEstimate,
    DimensionPlan, DimensionVerdict, EmptinessProfile, EmptinessRow, Prediction, ScaleRow,
};
