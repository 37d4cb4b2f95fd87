//! Experiments on circle coverings driven by arithmetic sequences.
//!
//! The crate is organised by task:
//!
//! * [`arith`]: exact circle arithmetic, continued fractions, Bohr sets and
//!   approximation functions `ψ`.
//! * [`sequences`]: generators for `(qₙ)`, lacunary thinning, level
//!   separation, gcd sums, divisor and root counting, and the weighted local
//!   count over dyadic blocks.
//! * [`coverset`]: exact arc-set algebra, i.i.d. random coverings, and the
//!   series test for covering.
//! * [`tree`]: coloured dyadic-tree percolation with plain and thick
//!   survival rules.
//! * [`limsupdim`]: digit-set fractals, box counting, and dimension estimates
//!   for random limsup sets.
//! * [`cassels`]: inhomogeneous product minima, uniform-in-δ searches, and
//!   the randomised covering model driven by `ψ(n)/∥nα − γ∥`.

pub mod arith;
pub mod cassels;
pub mod coverset;
pub mod error;
pub mod limsupdim;
pub mod report;
pub mod rng;
pub mod sequences;
pub mod tree;

pub use error::{Error, Result};
