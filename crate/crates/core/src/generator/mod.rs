//! Deterministic synthetic categorical dataset generation.
//!
//! A [`DatasetConfig`] describes the whole dataset; [`generate_dataset`]
//! runs the stages in a fixed order — feature sampling, correlations,
//! combinations, targets, drops, noise — with every stage's randomness
//! derived from (master seed, index, stage). Identical configs produce
//! bit-identical datasets, and generating columns in any order (or in
//! parallel) cannot change the result.

pub mod combine;
pub mod correlate;
pub mod dataset;
pub mod kmeans;
pub mod noise;
pub mod sample;
pub mod spec;
pub mod target;

use rayon::prelude::*;

use crate::error::Result;
use crate::rng::{derive_seed, Stage};

pub use dataset::{
    AppliedNoise, AugmentOps, AugmentRecord, ColumnMeta, ColumnOrigin, Dataset, LabelColumn,
    RawCsv, Sidecar,
};
pub use spec::{
    CombinationKind, CombinationSpec, CorrelationSpec, DatasetConfig, Distribution, FeatureSpec,
    NoiseMode, NoiseSpec, RowFn, TargetKind, TargetSpec, MISSING,
};

pub use combine::apply_combination;
pub use correlate::apply_correlation;
pub use kmeans::kmeans_labels;
pub use noise::apply_noise;
pub use sample::sample_feature;
pub use target::{apply_target, compute_target};

/// Runs the full generation pipeline for `config`.
pub fn generate_dataset(config: &DatasetConfig) -> Result<Dataset> {
    config.validate()?;
    let master = config.seed;
    let n_rows = config.n_rows;

    let columns: Vec<Vec<i64>> = config
        .features
        .par_iter()
        .enumerate()
        .map(|(j, spec)| sample_feature(spec, n_rows, derive_seed(master, j as u64, Stage::Feature)))
        .collect::<Result<_>>()?;

    let meta = config
        .features
        .iter()
        .map(|f| ColumnMeta {
            name: f.name.clone(),
            cardinality: f.cardinality,
            origin: ColumnOrigin::Feature {
                distribution: f.distribution.clone(),
            },
            noise: vec![],
        })
        .collect();

    let mut dataset = Dataset {
        n_rows,
        columns,
        meta,
        labels: vec![],
        seed: master,
    };

    for (i, spec) in config.correlations.iter().enumerate() {
        apply_correlation(&mut dataset, spec, derive_seed(master, i as u64, Stage::Correlation))?;
    }
    for spec in &config.combinations {
        apply_combination(&mut dataset, spec)?;
    }
    for (i, spec) in config.targets.iter().enumerate() {
        apply_target(&mut dataset, spec, derive_seed(master, i as u64, Stage::Target))?;
    }
    dataset.drop_columns(&config.drop_after_combine)?;
    for (i, spec) in config.noise.iter().enumerate() {
        apply_noise(&mut dataset, spec, derive_seed(master, i as u64, Stage::Noise))?;
    }
    Ok(dataset)
}

/// Applies one augmentation pass to an existing dataset, in the generator's
/// stage order minus sampling and targets: correlations, combinations,
/// drops, noise.
pub fn apply_augment(dataset: &mut Dataset, ops: &AugmentOps, seed: u64) -> Result<()> {
    for (i, spec) in ops.correlations.iter().enumerate() {
        apply_correlation(dataset, spec, derive_seed(seed, i as u64, Stage::Correlation))?;
    }
    for spec in &ops.combinations {
        apply_combination(dataset, spec)?;
    }
    dataset.drop_columns(&ops.drop)?;
    for (i, spec) in ops.noise.iter().enumerate() {
        apply_noise(dataset, spec, derive_seed(seed, i as u64, Stage::Noise))?;
    }
    Ok(())
}

/// Rebuilds a dataset from its sidecar: regenerates from the embedded
/// config and replays the augmentation lineage. The result is bit-identical
/// to the CSV the sidecar was written next to.
pub fn regenerate(sidecar: &Sidecar) -> Result<Dataset> {
    let mut dataset = generate_dataset(&sidecar.config)?;
    for record in &sidecar.lineage {
        apply_augment(&mut dataset, &record.ops, record.seed)?;
    }
    Ok(dataset)
}
