//! Stratified k-fold assignment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Fold id per row. Fold sizes differ by at most one and every fold holds
/// every class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<u32>,
    pub seed: u64,
}

impl FoldPlan {
    /// Per-class seeded shuffle followed by round-robin assignment. Each
    /// class continues the round-robin where the previous class stopped, so
    /// total fold sizes stay within one of each other.
    pub fn stratified(labels: &[i64], k: usize, seed: u64) -> Result<FoldPlan> {
        if k < 2 {
            return Err(Error::usage("kfold: k must be >= 2"));
        }
        let mut classes: Vec<i64> = labels.to_vec();
        classes.sort_unstable();
        classes.dedup();
        let mut rng = rng_from_seed(seed);
        let mut assignments = vec![0u32; labels.len()];
        let mut offset = 0usize;
        for class in classes {
            let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            if rows.len() < k {
                return Err(Error::usage(format!(
                    "kfold: class {class} has {} rows, fewer than k={k}",
                    rows.len()
                )));
            }
            crate::models::shuffled_order(&mut rows, &mut rng);
            for (pos, &row) in rows.iter().enumerate() {
                assignments[row] = ((offset + pos) % k) as u32;
            }
            offset += rows.len();
        }
        Ok(FoldPlan {
            k,
            assignments,
            seed,
        })
    }

    /// (train rows, test rows) for one held-out fold, both in row order.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (row, &f) in self.assignments.iter().enumerate() {
            if f as usize == fold {
                test.push(row);
            } else {
                train.push(row);
            }
        }
        (train, test)
    }
}
