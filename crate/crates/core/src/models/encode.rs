//! Sparse one-hot design matrices, with optional feature hashing.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::generator::{Dataset, MISSING};
use crate::rng::mix64;

/// How (column, code) pairs map to design dimensions.
#[derive(Debug, Clone)]
pub enum DimensionMapping {
    /// Each observed (column, code) pair owns a dimension, plus one
    /// dedicated missing dimension per column.
    Explicit {
        /// Per encoded column: observed code -> dimension.
        codes: Vec<BTreeMap<i64, u32>>,
        /// Per encoded column: the missing-cell dimension.
        missing: Vec<u32>,
    },
    /// dimension = hash(column, code) mod modulus; missing cells hash the
    /// sentinel like any other code.
    Hashed { modulus: u32 },
}

/// Row-major sparse one-hot design: every row has exactly one active
/// dimension per encoded column (implicit value 1).
#[derive(Debug, Clone)]
pub struct SparseDesign {
    pub n_rows: usize,
    pub n_dims: usize,
    /// Active dimensions per encoded column, fixed stride.
    n_cols: usize,
    indices: Vec<u32>,
    pub mapping: DimensionMapping,
}

impl SparseDesign {
    /// Encodes every column of the dataset.
    pub fn encode(dataset: &Dataset, hashed_dims: Option<u32>) -> Result<SparseDesign> {
        let all: Vec<usize> = (0..dataset.n_columns()).collect();
        SparseDesign::encode_columns(dataset, &all, hashed_dims)
    }

    /// Encodes a column subset, in the order given.
    pub fn encode_columns(
        dataset: &Dataset,
        columns: &[usize],
        hashed_dims: Option<u32>,
    ) -> Result<SparseDesign> {
        if columns.is_empty() {
            return Err(Error::config("encode: column subset must not be empty"));
        }
        for &c in columns {
            if c >= dataset.n_columns() {
                return Err(Error::config(format!(
                    "encode: column index {c} out of range (dataset has {} columns)",
                    dataset.n_columns()
                )));
            }
        }
        let n_rows = dataset.n_rows;
        let n_cols = columns.len();
        let mut indices = vec![0u32; n_rows * n_cols];

        match hashed_dims {
            None => {
                let mut codes: Vec<BTreeMap<i64, u32>> = Vec::with_capacity(n_cols);
                let mut missing: Vec<u32> = Vec::with_capacity(n_cols);
                let mut next = 0u32;
                for &col in columns {
                    let mut map = BTreeMap::new();
                    let mut observed: Vec<i64> = dataset
                        .column(col)
                        .iter()
                        .copied()
                        .filter(|&v| v != MISSING)
                        .collect();
                    observed.sort_unstable();
                    observed.dedup();
                    for code in observed {
                        map.insert(code, next);
                        next += 1;
                    }
                    codes.push(map);
                    missing.push(next);
                    next += 1;
                }
                for (j, &col) in columns.iter().enumerate() {
                    let map = &codes[j];
                    let miss = missing[j];
                    for (i, &v) in dataset.column(col).iter().enumerate() {
                        indices[i * n_cols + j] = if v == MISSING { miss } else { map[&v] };
                    }
                }
                Ok(SparseDesign {
                    n_rows,
                    n_dims: next as usize,
                    n_cols,
                    indices,
                    mapping: DimensionMapping::Explicit { codes, missing },
                })
            }
            Some(modulus) => {
                if (modulus as usize) < n_cols {
                    return Err(Error::config(format!(
                        "encode: hashed dimension count {modulus} is below the column count {n_cols}"
                    )));
                }
                for (j, &col) in columns.iter().enumerate() {
                    for (i, &v) in dataset.column(col).iter().enumerate() {
                        indices[i * n_cols + j] = hash_dim(j as u32, v, modulus);
                    }
                }
                Ok(SparseDesign {
                    n_rows,
                    n_dims: modulus as usize,
                    n_cols,
                    indices,
                    mapping: DimensionMapping::Hashed { modulus },
                })
            }
        }
    }

    /// Active dimensions of one row.
    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.indices[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn n_encoded_columns(&self) -> usize {
        self.n_cols
    }

    /// New design holding only the given rows, in the given order.
    pub fn subset_rows(&self, rows: &[usize]) -> SparseDesign {
        let mut indices = Vec::with_capacity(rows.len() * self.n_cols);
        for &r in rows {
            indices.extend_from_slice(self.row(r));
        }
        SparseDesign {
            n_rows: rows.len(),
            n_dims: self.n_dims,
            n_cols: self.n_cols,
            indices,
            mapping: self.mapping.clone(),
        }
    }
}

/// Deterministic dimension hash for feature hashing.
#[inline]
pub fn hash_dim(column: u32, code: i64, modulus: u32) -> u32 {
    (mix64(code as u64 ^ mix64(column as u64 ^ 0x6a09_e667_f3bc_c908)) % modulus as u64) as u32
}
