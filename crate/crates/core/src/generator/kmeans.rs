//! Lloyd's k-means with k-means++ seeding, deterministic per seed.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

const MAX_ITERS: usize = 100;
const SHIFT_TOL: f64 = 1e-4;

/// Clusters row-major `data` (n_rows x n_dims) into k groups and returns a
/// label in {0..k-1} per row. Every cluster ends non-empty: an emptied
/// cluster is reseeded to the point farthest from its assigned centroid.
pub fn kmeans_labels(data: &[f64], n_rows: usize, n_dims: usize, k: usize, seed: u64) -> Result<Vec<i64>> {
    assert_eq!(data.len(), n_rows * n_dims, "data shape mismatch");
    if k < 2 {
        return Err(Error::config("clustering: k must be >= 2"));
    }
    if n_rows < k {
        return Err(Error::config(format!(
            "clustering: k={k} exceeds the number of rows {n_rows}"
        )));
    }
    let distinct = distinct_rows(data, n_rows, n_dims);
    if distinct < k {
        return Err(Error::config(format!(
            "clustering: k={k} exceeds the number of distinct rows {distinct}"
        )));
    }

    let row = |i: usize| &data[i * n_dims..(i + 1) * n_dims];
    let mut rng = rng_from_seed(seed);

    // k-means++ seeding.
    let mut centroids: Vec<f64> = Vec::with_capacity(k * n_dims);
    let first = rng.random_range(0..n_rows);
    centroids.extend_from_slice(row(first));
    let mut dist2: Vec<f64> = (0..n_rows)
        .map(|i| squared_distance(row(i), &centroids[..n_dims]))
        .collect();
    while centroids.len() < k * n_dims {
        let total: f64 = dist2.iter().sum();
        let picked = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut picked = n_rows - 1;
            for (i, &d) in dist2.iter().enumerate() {
                target -= d;
                if target <= 0.0 {
                    picked = i;
                    break;
                }
            }
            picked
        } else {
            rng.random_range(0..n_rows)
        };
        let start = centroids.len();
        centroids.extend_from_slice(row(picked));
        let new_c = centroids[start..].to_vec();
        for (i, d) in dist2.iter_mut().enumerate() {
            *d = d.min(squared_distance(row(i), &new_c));
        }
    }

    // Lloyd iterations.
    let mut labels = vec![0usize; n_rows];
    let mut counts = vec![0usize; k];
    let mut sums = vec![0.0f64; k * n_dims];
    for _ in 0..MAX_ITERS {
        for (i, label) in labels.iter_mut().enumerate() {
            *label = nearest_centroid(row(i), &centroids, n_dims);
        }

        counts.fill(0);
        sums.fill(0.0);
        for (i, &label) in labels.iter().enumerate() {
            counts[label] += 1;
            let acc = &mut sums[label * n_dims..(label + 1) * n_dims];
            for (a, v) in acc.iter_mut().zip(row(i)) {
                *a += v;
            }
        }

        // Reseed empty clusters to the farthest point.
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let farthest = (0..n_rows)
                .max_by(|&a, &b| {
                    let da = squared_distance(row(a), centroid(&centroids, labels[a], n_dims));
                    let db = squared_distance(row(b), centroid(&centroids, labels[b], n_dims));
                    da.total_cmp(&db)
                })
                .expect("n_rows >= k >= 2");
            let old = labels[farthest];
            counts[old] -= 1;
            for (a, v) in sums[old * n_dims..(old + 1) * n_dims].iter_mut().zip(row(farthest)) {
                *a -= v;
            }
            labels[farthest] = c;
            counts[c] = 1;
            sums[c * n_dims..(c + 1) * n_dims].copy_from_slice(row(farthest));
        }

        let mut max_shift = 0.0f64;
        for c in 0..k {
            let n = counts[c] as f64;
            let mut shift = 0.0;
            for d in 0..n_dims {
                let new = sums[c * n_dims + d] / n;
                let delta = new - centroids[c * n_dims + d];
                shift += delta * delta;
                centroids[c * n_dims + d] = new;
            }
            max_shift = max_shift.max(shift.sqrt());
        }
        if max_shift < SHIFT_TOL {
            break;
        }
    }

    // Final assignment against the converged centroids.
    for (i, label) in labels.iter_mut().enumerate() {
        *label = nearest_centroid(row(i), &centroids, n_dims);
    }
    Ok(labels.into_iter().map(|l| l as i64).collect())
}

fn centroid(centroids: &[f64], c: usize, n_dims: usize) -> &[f64] {
    &centroids[c * n_dims..(c + 1) * n_dims]
}

fn nearest_centroid(point: &[f64], centroids: &[f64], n_dims: usize) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, chunk) in centroids.chunks_exact(n_dims).enumerate() {
        let d = squared_distance(point, chunk);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn distinct_rows(data: &[f64], n_rows: usize, n_dims: usize) -> usize {
    use std::collections::HashSet;
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(n_rows);
    for i in 0..n_rows {
        let key: Vec<u64> = data[i * n_dims..(i + 1) * n_dims]
            .iter()
            .map(|v| v.to_bits())
            .collect();
        seen.insert(key);
    }
    seen.len()
}
