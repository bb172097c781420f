//! Correlated child columns.
//!
//! A child is built by rotating the standardized source codes against an
//! independent Gaussian noise direction: y = rho*z(x) + sqrt(1-rho^2)*eps,
//! then quantizing y to the requested cardinality by equal-frequency
//! binning. Rank correlation between source and child tracks rho.

use rand_distr::{Distribution as Sampler, StandardNormal};

use crate::error::{Error, Result};
use crate::generator::dataset::{ColumnMeta, ColumnOrigin, Dataset};
use crate::generator::spec::{CorrelationSpec, MISSING};
use crate::rng::rng_from_seed;

/// Appends the correlated column described by `spec`.
///
/// Missing source cells stay missing in the child. The source must have at
/// least two distinct non-missing values.
pub fn apply_correlation(dataset: &mut Dataset, spec: &CorrelationSpec, seed: u64) -> Result<()> {
    spec.validate(dataset.n_columns(), &format!("correlation {}", spec.new_name))?;
    let source = dataset.column(spec.source);

    let observed: Vec<f64> = source
        .iter()
        .filter(|&&v| v != MISSING)
        .map(|&v| v as f64)
        .collect();
    if observed.is_empty() {
        return Err(Error::config(format!(
            "correlation {}: source column {} has no non-missing values",
            spec.new_name, spec.source
        )));
    }
    let mean = observed.iter().sum::<f64>() / observed.len() as f64;
    let var = observed.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / observed.len() as f64;
    if var == 0.0 {
        return Err(Error::config(format!(
            "correlation {}: source column {} is constant",
            spec.new_name, spec.source
        )));
    }
    let sd = var.sqrt();

    let mut rng = rng_from_seed(seed);
    let noise_scale = (1.0 - spec.rho * spec.rho).max(0.0).sqrt();
    let mut latent = Vec::with_capacity(dataset.n_rows);
    for &v in source {
        // Draw per row, hit or miss, to keep the stream aligned with the
        // row index regardless of missingness.
        let eps: f64 = StandardNormal.sample(&mut rng);
        if v == MISSING {
            latent.push(f64::NAN);
        } else {
            let z = (v as f64 - mean) / sd;
            latent.push(spec.rho * z + noise_scale * eps);
        }
    }

    let child = quantize_equal_frequency(&latent, spec.out_cardinality);
    let source_name = dataset.column_name(spec.source).to_owned();
    dataset.columns.push(child);
    dataset.meta.push(ColumnMeta {
        name: spec.new_name.clone(),
        cardinality: spec.out_cardinality,
        origin: ColumnOrigin::Correlated {
            source: source_name,
            rho: spec.rho,
        },
        noise: vec![],
    });
    Ok(())
}

/// Equal-frequency quantization into {0..k-1}. NaN cells (missing) come out
/// as the missing sentinel. Ties share a bin: when the number of distinct
/// values is at most k, each distinct value gets its own bin, so a
/// noise-free rotation (|rho| = 1) is a monotone recoding of its source.
fn quantize_equal_frequency(values: &[f64], k: u64) -> Vec<i64> {
    let mut order: Vec<usize> = (0..values.len()).filter(|&i| !values[i].is_nan()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let n = order.len();

    // Group ties.
    let mut groups: Vec<&[usize]> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || values[order[i]] != values[order[start]] {
            groups.push(&order[start..i]);
            start = i;
        }
    }

    let mut out = vec![MISSING; values.len()];
    if groups.len() as u64 <= k {
        for (bin, group) in groups.iter().enumerate() {
            for &row in *group {
                out[row] = bin as i64;
            }
        }
    } else {
        // Bin by the rank of each group's first member; whole groups land
        // in one bin, so equal latent values never split.
        let mut rank = 0usize;
        for group in groups {
            let bin = (rank as u128 * k as u128 / n as u128) as i64;
            for &row in group {
                out[row] = bin;
            }
            rank += group.len();
        }
    }
    out
}
