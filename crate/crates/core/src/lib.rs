//! Adaptive clustering of items into two groups by querying single
//! `(item, feature)` entries of a noisy matrix.
//!
//! The pipeline first finds an item from the group opposite to item 1
//! ([`detect::candidate_row`]), then a discriminative feature on that item's
//! row and labels every item on it ([`classify::cluster_by_candidates`]).
//! Both stages are driven by [`csh::compare_sequential_halving`].
//! [`bounds`] evaluates the matching complexity and lower-bound formulas,
//! [`baseline`] is the uniform-sampling + 2-means comparison and
//! [`harness`] runs seeded Monte-Carlo experiments and writes CSV reports.

pub mod baseline;
pub mod bounds;
pub mod classify;
pub mod csh;
pub mod detect;
pub mod env;
pub mod error;
pub mod harness;
pub mod pipeline;
pub mod rng;

pub use env::{Environment, NoiseModel, ProblemInstance, QueryLedger};
pub use error::{Error, Result};
pub use pipeline::{bandit_clustering, PipelineOutcome};
