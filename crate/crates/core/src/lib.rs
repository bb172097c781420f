//! Workbench for recommender-system building blocks on synthetic data.
//!
//! Four pieces, all seeded and deterministic:
//!
//! - [`generator`] — synthesizes high-dimensional categorical datasets with
//!   controlled distributions, feature combinations, correlations, targets,
//!   noise, and missing cells;
//! - [`sketch`] — distinct-count estimation (exact set, HyperLogLog, and a
//!   cached counter that stays exact under a memory budget) plus a
//!   per-column benchmark runner;
//! - [`models`] — logistic regression and a degree-2 factorization machine
//!   over sparse one-hot encodings, with an interaction-bias benchmark;
//! - [`automl`] — greedy forward feature selection driven by a
//!   cross-validated linear surrogate.

pub mod automl;
pub mod error;
pub mod generator;
pub mod models;
pub mod rng;
pub mod sketch;

pub use error::{Error, Result};
pub use generator::{generate_dataset, Dataset, DatasetConfig};
pub use models::{SparseDesign, TrainConfig};
pub use sketch::{CachedCounter, HllSketch};
