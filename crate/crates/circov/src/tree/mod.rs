//! Colored dyadic-tree percolation: level schedules, the coloring step,
//! uncolored-path events and thick-path survival.
//!
//! Level `n` of the binary tree consists of the dyadic intervals of length
//! `2⁻ⁿ`. The points with indices in the level's block color every vertex
//! they land in. A point sequence covers the circle exactly when no
//! uncolored path survives, and a surviving *thick* uncolored path (whose
//! vertices' neighbours are also uncolored) witnesses a point that is never
//! approximated.

pub mod frontier;
pub mod record;
pub mod run;
pub mod schedule;
pub mod source;

pub use frontier::{cell_of, Frontier, LevelStats, Mode, DEFAULT_THRESHOLD_BASE, MAX_LEVEL};
pub use record::{uncolored_path_exists, ColoringRecord, LevelColoring};
pub use run::{
    event_frequency, iid_event_bound, run_tree, survival_frequency, thick_survival_trial, EventBound, EventEstimate,
    RunConfig, SurvivalEstimate, SurvivalOutcome, TreeRun,
};
pub use schedule::{CoveringSchedule, LevelBlock};
pub use source::{OrbitSource, PointSource};
