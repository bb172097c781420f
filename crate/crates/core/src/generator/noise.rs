//! Cell-level corruption: categorical resampling and missing injection.

use rand::Rng;

use crate::error::Result;
use crate::generator::dataset::{AppliedNoise, Dataset};
use crate::generator::spec::{NoiseMode, NoiseSpec, MISSING};
use crate::rng::{derive_seed, rng_from_seed, Stage};

/// Applies one noise pass. Each targeted column gets its own substream
/// derived from `seed` and the column index, so results do not depend on
/// which columns the spec happens to touch.
pub fn apply_noise(dataset: &mut Dataset, spec: &NoiseSpec, seed: u64) -> Result<()> {
    spec.validate(dataset.n_columns(), "noise")?;
    let targets: Vec<usize> = match &spec.columns {
        Some(cols) => cols.clone(),
        None => (0..dataset.n_columns()).collect(),
    };
    for &col in &targets {
        let col_seed = derive_seed(seed, col as u64, Stage::NoiseColumn);
        match spec.mode {
            NoiseMode::Categorical => {
                let cardinality = dataset.meta[col].cardinality;
                resample_cells(&mut dataset.columns[col], cardinality, spec.p, col_seed);
            }
            NoiseMode::Missing => {
                blank_cells(&mut dataset.columns[col], spec.p, col_seed);
            }
        }
        dataset.meta[col].noise.push(AppliedNoise {
            mode: spec.mode,
            p: spec.p,
        });
    }
    Ok(())
}

/// With independent probability p, resample each non-missing cell uniformly
/// within {0..cardinality-1}. The resample may reproduce the original value,
/// so the expected changed fraction is p * (1 - 1/cardinality).
fn resample_cells(column: &mut [i64], cardinality: u64, p: f64, seed: u64) {
    let mut rng = rng_from_seed(seed);
    for cell in column.iter_mut() {
        if *cell == MISSING {
            continue;
        }
        if rng.random::<f64>() < p {
            *cell = rng.random_range(0..cardinality) as i64;
        }
    }
}

/// With independent probability p, set each cell to the missing sentinel.
fn blank_cells(column: &mut [i64], p: f64, seed: u64) {
    let mut rng = rng_from_seed(seed);
    for cell in column.iter_mut() {
        if rng.random::<f64>() < p {
            *cell = MISSING;
        }
    }
}
