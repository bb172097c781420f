//! Classifiers over one-hot categorical data and the linear-vs-interaction
//! benchmark built on them.

pub mod encode;
pub mod fm;
pub mod interaction;
pub mod linear;
pub mod metrics;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use encode::{hash_dim, DimensionMapping, SparseDesign};
pub use fm::{FmGrad, FmModel};
pub use interaction::{
    run_interaction_benchmark, BaseParams, InteractionOutcome, MetricsReport, MetricsRow,
    ModelKind, PredictionRow, TrainProtocol,
};
pub use linear::{LinearGrad, LinearModel};
pub use metrics::{accuracy_and_log_loss, auc, average_ranks, spearman};

/// SGD hyperparameters shared by both model families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Per-step L2 on active weights (and factors); bias unregularized.
    pub l2: f64,
    /// FM latent dimension; ignored by the linear model.
    pub k: usize,
    /// FM factor initialization standard deviation.
    pub init_scale: f64,
    pub seed: u64,
    /// Reshuffle row order every epoch.
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            epochs: 1,
            l2: 1e-6,
            k: 8,
            init_scale: 0.01,
            seed: 0,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::config("train: learning_rate must be positive"));
        }
        if self.epochs < 1 {
            return Err(Error::config("train: epochs must be >= 1"));
        }
        if self.k < 1 {
            return Err(Error::config("train: k must be >= 1"));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::config("train: l2 must be non-negative"));
        }
        if !(self.init_scale.is_finite() && self.init_scale >= 0.0) {
            return Err(Error::config("train: init_scale must be non-negative"));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// ln(1 + e^x) without overflow.
#[inline]
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub(crate) fn check_binary_labels(design: &encode::SparseDesign, labels: &[i64]) -> Result<()> {
    if design.n_rows == 0 {
        return Err(Error::usage("train: design has no rows"));
    }
    if labels.len() != design.n_rows {
        return Err(Error::usage(format!(
            "train: {} labels for {} rows",
            labels.len(),
            design.n_rows
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y != 0 && y != 1) {
        return Err(Error::usage(format!(
            "train: labels must be binary (0/1), found {bad}"
        )));
    }
    Ok(())
}

pub(crate) fn shuffled_order(order: &mut [usize], rng: &mut rand_chacha::ChaCha8Rng) {
    order.shuffle(rng);
}
