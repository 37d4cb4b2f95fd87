//! Random coverings of the circle: exact arc-set algebra, i.i.d. covering
//! trials, and the series criterion for almost-sure covering.

pub mod arcset;
pub mod dvoretzky;
pub mod grid;
pub mod lengths;
pub mod shepp;

pub use arcset::{Arc, ArcSet, TURN};
pub use dvoretzky::{dvoretzky_trial, expected_uncovered, monte_carlo_uncovered, CoverSummary, CoverTrial, ExpectedUncovered, TrialRow};
pub use grid::{grid_covered_infinitely_often, window_of, GridCoverage};
pub use lengths::LengthSequence;
pub use shepp::{closed_form_verdict, shepp_terms, SheppReport, SheppVerdict};
