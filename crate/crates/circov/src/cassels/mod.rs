//! Inhomogeneous products `n·∥nα − γ∥·∥nβ − δ∥`: deterministic searches,
//! the randomised covering model, and its block diagnostics.

pub mod model;
pub mod regime;
pub mod search;

pub use model::{model_lengths, random_model_trial};
pub use regime::{psi_regime, BucketRange, Regime, RegimeConfig, RegimeDiagnostics, WindowRow};
pub use search::{
    best_inhom_approx, default_n_min, inhom_chain, product_minima, uniform_delta_check, uniform_delta_survey,
    BlockBest, CasselsInstance, ProductMinima, ProductRecord, UniformDeltaReport, UniformDeltaSurvey,
};
