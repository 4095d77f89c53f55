//! Constrained multi-armed bandits under non-stationary constraints.
//!
//! The crate provides the online learners (full-feedback constrained mirror
//! descent with fixed share, its implicit-exploration variant, the
//! explore-then-optimize bandit algorithm, and a known-corruption baseline),
//! exact offline ground truth (hindsight optimum, feasibility margins, and the
//! corruption level of an instance), the entropic projection engine behind
//! them, and the metrics and diagnostics used to verify regret and
//! positive-violation scaling empirically.

pub mod algorithms;
pub mod diagnostics;
pub mod env;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod metrics;
pub mod offline;
pub mod omd;
pub mod strategy;
pub mod validation;

pub use error::{Error, Result};
