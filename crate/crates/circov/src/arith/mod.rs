//! Exact circle arithmetic: real descriptors, fixed-point circle points,
//! continued fractions, Bohr-set counting and approximation functions.

pub mod ball;
pub mod bohr;
pub mod cf;
pub mod psi;
pub mod real;
pub mod unit;

pub use ball::Ball;
pub use bohr::{annulus_count, bohr_bracket, bohr_count, AnnulusCalibration, AnnulusReport, BohrBracket, BohrQuery};
pub use cf::{continued_fraction, ContinuedFractionExpansion};
pub use psi::{exp_window_sum, Psi, WindowSum};
pub use real::Real;
pub use unit::{nearest_int_dist, nearest_int_dist_real, CircleOrbit, DistInterval, Pow2Reader, Threshold, UnitPoint, Wide, DEFAULT_PRECISION};
