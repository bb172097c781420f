//! Label generation: clustering, linear and nonlinear median splits, and
//! custom decision functions.

use rand_distr::{Distribution as Sampler, StandardNormal};

use crate::error::{Error, Result};
use crate::generator::dataset::{Dataset, LabelColumn};
use crate::generator::kmeans::kmeans_labels;
use crate::generator::spec::{TargetKind, TargetSpec, MISSING};
use crate::rng::rng_from_seed;

/// Computes the label vector for `spec` without attaching it.
///
/// Binary kinds (Linear, Nonlinear) split at the median of a row score:
/// rows strictly above get 1, rows strictly below get 0, and rows tied at
/// the cut are resolved in row order (earlier rows get 0) so the class
/// balance is exact to within one row. A constant score has no split and is
/// a configuration error.
pub fn compute_target(dataset: &Dataset, spec: &TargetSpec, seed: u64) -> Result<Vec<i64>> {
    spec.validate(dataset.n_columns(), &format!("target {}", spec.kind.label()))?;
    let used: Vec<usize> = match &spec.kind {
        TargetKind::Custom(_) => (0..dataset.n_columns()).collect(),
        TargetKind::Clustering { .. } if spec.relevant.is_empty() => {
            (0..dataset.n_columns()).collect()
        }
        _ => spec.relevant.clone(),
    };
    for &col in &used {
        if dataset.column(col).contains(&MISSING) {
            return Err(Error::config(format!(
                "target {}: column {} ({}) contains missing cells at labeling time",
                spec.kind.label(),
                col,
                dataset.column_name(col)
            )));
        }
    }

    match &spec.kind {
        TargetKind::Clustering { k } => {
            let matrix = standardized_matrix(dataset, &used);
            kmeans_labels(&matrix, dataset.n_rows, used.len(), *k, seed)
        }
        TargetKind::Linear => {
            let mut rng = rng_from_seed(seed);
            let weights: Vec<f64> = (0..used.len())
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let scores: Vec<f64> = (0..dataset.n_rows)
                .map(|row| {
                    used.iter()
                        .zip(&weights)
                        .map(|(&col, w)| w * dataset.column(col)[row] as f64)
                        .sum()
                })
                .collect();
            median_split(&scores, "linear")
        }
        TargetKind::Nonlinear => {
            let r: Vec<&[i64]> = used[..4].iter().map(|&c| dataset.column(c)).collect();
            let scores: Vec<f64> = (0..dataset.n_rows)
                .map(|i| {
                    let xor = (r[0][i] ^ r[1][i]) as f64;
                    let prod = r[2][i] as i128 * r[3][i] as i128;
                    xor + prod as f64
                })
                .collect();
            median_split(&scores, "nonlinear")
        }
        TargetKind::Custom(f) => {
            let mut row = vec![0i64; dataset.n_columns()];
            Ok((0..dataset.n_rows)
                .map(|i| {
                    for (slot, col) in row.iter_mut().zip(&dataset.columns) {
                        *slot = col[i];
                    }
                    f(&row)
                })
                .collect())
        }
    }
}

/// Computes the labels for `spec` and appends them as a label column.
/// The first target is named `label`, later ones `label2`, `label3`, ...
/// unless the spec names itself.
pub fn apply_target(dataset: &mut Dataset, spec: &TargetSpec, seed: u64) -> Result<()> {
    let values = compute_target(dataset, spec, seed)?;
    let name = match &spec.name {
        Some(n) => n.clone(),
        None if dataset.labels.is_empty() => "label".to_owned(),
        None => format!("label{}", dataset.labels.len() + 1),
    };
    if dataset.labels.iter().any(|l| l.name == name) {
        return Err(Error::config(format!(
            "target: duplicate label column name {name:?}"
        )));
    }
    dataset.labels.push(LabelColumn { name, values });
    Ok(())
}

/// Binary labels: exactly floor(n/2) ones, ordered by (score, row index).
fn median_split(scores: &[f64], kind: &str) -> Result<Vec<i64>> {
    let n = scores.len();
    let first = scores[0];
    if scores.iter().all(|&s| s == first) {
        return Err(Error::config(format!(
            "target {kind}: score is constant across all rows, no median split possible"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    let mut labels = vec![0i64; n];
    for &row in &order[n - n / 2..] {
        labels[row] = 1;
    }
    Ok(labels)
}

/// Row-major matrix of the selected columns, each standardized to mean 0,
/// unit variance (constant columns become all zeros).
fn standardized_matrix(dataset: &Dataset, columns: &[usize]) -> Vec<f64> {
    let n = dataset.n_rows;
    let d = columns.len();
    let mut stats = Vec::with_capacity(d);
    for &col in columns {
        let values = dataset.column(col);
        let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n as f64;
        let var = values
            .iter()
            .map(|&v| (v as f64 - mean) * (v as f64 - mean))
            .sum::<f64>()
            / n as f64;
        stats.push((mean, if var > 0.0 { var.sqrt() } else { 1.0 }));
    }
    let mut out = vec![0.0f64; n * d];
    for (j, &col) in columns.iter().enumerate() {
        let (mean, sd) = stats[j];
        let values = dataset.column(col);
        for i in 0..n {
            out[i * d + j] = (values[i] as f64 - mean) / sd;
        }
    }
    out
}
