//! k-means++ seeding and LocalSearch++ with structural diagnostics.
//!
//! The crate is organized bottom-up:
//!
//! - [`geometry`]: point storage, squared distances, costs, centroids.
//! - [`state`]: candidate centers with a two-closest-center cache.
//! - [`sampling`]: seedable streams and D²-sampling.
//! - [`seeding`]: k-means++ initialization.
//! - [`localsearch`]: the one-pass swap engine and local-search steps.
//! - [`analysis`]: exact oracle, planted references and structural
//!   diagnostics (settledness, matched/lonely centers, reassignment costs,
//!   γ-good clusters, approximation factors).
//! - [`generate`], [`io`], [`lloyd`], [`experiment`]: instance generation,
//!   point files, Lloyd refinement and the experiment harness behind the
//!   `lspp` binary.

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod geometry;
pub mod io;
pub mod lloyd;
pub mod localsearch;
pub mod sampling;
pub mod seeding;
pub mod state;

pub use error::{Error, Result};
pub use geometry::{
    centroid, cost, decomposition_residual, squared_distance, subset_cost, PointSet,
};
pub use localsearch::{
    best_swap, local_search_step, run_local_search, run_local_search_with, steps_for_epsilon,
    StepRecord, SwapCandidate, SwapOutcome, Trajectory,
};
pub use sampling::{d2_sample, d2_sample_within, uniform_sample, RandomSource};
pub use seeding::kmeanspp_seed;
pub use state::{CenterState, Nearest};
