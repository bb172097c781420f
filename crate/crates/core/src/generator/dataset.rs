//! Columnar dataset of integer category codes plus per-column lineage.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::spec::{DatasetConfig, Distribution, NoiseMode, MISSING};

/// How a column came to exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ColumnOrigin {
    Feature { distribution: Distribution },
    Correlated { source: String, rho: f64 },
    Combination { kind: String, parents: Vec<String> },
}

/// One noise pass that touched a column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppliedNoise {
    pub mode: NoiseMode,
    pub p: f64,
}

/// Per-column metadata: name, domain size, derivation tag, noise history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub name: String,
    /// Domain bound: non-missing cells lie in {0..cardinality-1}.
    pub cardinality: u64,
    pub origin: ColumnOrigin,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub noise: Vec<AppliedNoise>,
}

/// One label vector; datasets may carry several (e.g. a clustering target
/// and a custom decision function side by side).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelColumn {
    pub name: String,
    pub values: Vec<i64>,
}

/// Columnar table of i64 category codes. Missing cells are exactly -1;
/// all other cells are non-negative and below their column's cardinality.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n_rows: usize,
    pub columns: Vec<Vec<i64>>,
    pub meta: Vec<ColumnMeta>,
    pub labels: Vec<LabelColumn>,
    /// Master seed the dataset was generated from.
    pub seed: u64,
}

impl Dataset {
    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, index: usize) -> &[i64] {
        &self.columns[index]
    }

    pub fn column_name(&self, index: usize) -> &str {
        &self.meta[index].name
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.meta.iter().position(|m| m.name == name)
    }

    /// Primary label vector (the first target), if any.
    pub fn label_values(&self) -> Option<&[i64]> {
        self.labels.first().map(|l| l.values.as_slice())
    }

    /// Checks the structural invariants; used by tests and after augmentation.
    pub fn check_invariants(&self) -> Result<()> {
        if self.columns.len() != self.meta.len() {
            return Err(Error::usage(format!(
                "dataset has {} columns but {} metadata entries",
                self.columns.len(),
                self.meta.len()
            )));
        }
        for (j, col) in self.columns.iter().enumerate() {
            if col.len() != self.n_rows {
                return Err(Error::usage(format!(
                    "column {j} has {} rows, expected {}",
                    col.len(),
                    self.n_rows
                )));
            }
            let c = self.meta[j].cardinality as i64;
            for (i, &v) in col.iter().enumerate() {
                if v != MISSING && !(0..c).contains(&v) {
                    return Err(Error::usage(format!(
                        "column {j} ({}) row {i}: value {v} outside domain 0..{c}",
                        self.meta[j].name
                    )));
                }
            }
        }
        for l in &self.labels {
            if l.values.len() != self.n_rows {
                return Err(Error::usage(format!(
                    "label column {} has {} rows, expected {}",
                    l.name,
                    l.values.len(),
                    self.n_rows
                )));
            }
        }
        Ok(())
    }

    /// Removes the given columns; remaining columns keep their relative
    /// order and metadata stays aligned. Labels are untouched.
    pub fn drop_columns(&mut self, indices: &[usize]) -> Result<()> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != indices.len() {
            return Err(Error::config("drop: indices must be distinct"));
        }
        if let Some(&bad) = sorted.iter().find(|&&i| i >= self.columns.len()) {
            return Err(Error::config(format!(
                "drop: column index {bad} out of range (dataset has {} columns)",
                self.columns.len()
            )));
        }
        if sorted.len() == self.columns.len() {
            return Err(Error::config("drop: cannot drop every column"));
        }
        for &i in sorted.iter().rev() {
            self.columns.remove(i);
            self.meta.remove(i);
        }
        Ok(())
    }

    /// New dataset containing only the selected columns (labels retained).
    pub fn select_columns(&self, indices: &[usize]) -> Result<Dataset> {
        for &i in indices {
            if i >= self.columns.len() {
                return Err(Error::usage(format!(
                    "select: column index {i} out of range (dataset has {} columns)",
                    self.columns.len()
                )));
            }
        }
        Ok(Dataset {
            n_rows: self.n_rows,
            columns: indices.iter().map(|&i| self.columns[i].clone()).collect(),
            meta: indices.iter().map(|&i| self.meta[i].clone()).collect(),
            labels: self.labels.clone(),
            seed: self.seed,
        })
    }

    /// Writes the fixed CSV dialect: comma-separated, LF line endings,
    /// header of column names, one row per sample, -1 for missing, label
    /// columns last.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        use std::fmt::Write as _;
        let mut header = Vec::with_capacity(self.columns.len() + self.labels.len());
        header.extend(self.meta.iter().map(|m| m.name.as_str()));
        header.extend(self.labels.iter().map(|l| l.name.as_str()));
        let mut line = String::with_capacity(header.len() * 8);
        line.push_str(&header.join(","));
        line.push('\n');
        w.write_all(line.as_bytes())?;
        for row in 0..self.n_rows {
            line.clear();
            let mut first = true;
            for col in self.columns.iter().chain(self.labels.iter().map(|l| &l.values)) {
                if !first {
                    line.push(',');
                }
                first = false;
                write!(line, "{}", col[row]).expect("string write cannot fail");
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn csv_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to Vec cannot fail");
        buf
    }
}

/// Raw parse of the fixed CSV dialect: header plus i64 columns.
#[derive(Debug, Clone)]
pub struct RawCsv {
    pub header: Vec<String>,
    pub columns: Vec<Vec<i64>>,
}

impl RawCsv {
    pub fn parse(bytes: &[u8]) -> Result<RawCsv> {
        let text = std::str::from_utf8(bytes)
            .map_err(|_| Error::config("csv: file is not valid UTF-8"))?;
        let mut lines = text.lines();
        let header_line = lines
            .next()
            .ok_or_else(|| Error::config("csv: empty file"))?;
        let header: Vec<String> = header_line.split(',').map(str::to_owned).collect();
        let n_cols = header.len();
        let mut columns: Vec<Vec<i64>> = vec![Vec::new(); n_cols];
        for (row, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut count = 0;
            for (j, cell) in line.split(',').enumerate() {
                if j >= n_cols {
                    return Err(Error::config(format!(
                        "csv: row {row} has more than {n_cols} cells"
                    )));
                }
                let v: i64 = cell.parse().map_err(|_| {
                    Error::config(format!("csv: row {row} column {j}: {cell:?} is not an integer"))
                })?;
                columns[j].push(v);
                count += 1;
            }
            if count != n_cols {
                return Err(Error::config(format!(
                    "csv: row {row} has {count} cells, expected {n_cols}"
                )));
            }
        }
        Ok(RawCsv { header, columns })
    }
}

/// One augmentation pass applied to an existing dataset. Stages run in the
/// generator's order, minus sampling and targets: correlations,
/// combinations, drops, noise.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AugmentOps {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub correlations: Vec<crate::generator::spec::CorrelationSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub combinations: Vec<crate::generator::spec::CombinationSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drop: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub noise: Vec<crate::generator::spec::NoiseSpec>,
}

impl AugmentOps {
    pub fn is_empty(&self) -> bool {
        self.correlations.is_empty()
            && self.combinations.is_empty()
            && self.drop.is_empty()
            && self.noise.is_empty()
    }
}

/// Record of one augmentation in a sidecar's lineage chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AugmentRecord {
    /// SHA-256 of the input CSV bytes, hex-encoded.
    pub input_sha256: String,
    pub seed: u64,
    pub ops: AugmentOps,
}

/// JSON sidecar written next to every dataset CSV. Carries everything
/// needed to regenerate the CSV bit-exactly: the generating config, the
/// master seed, and the augmentation lineage, plus per-column derivation
/// tags for human consumption.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub version: u32,
    pub seed: u64,
    pub n_rows: usize,
    pub config: DatasetConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lineage: Vec<AugmentRecord>,
    pub columns: Vec<ColumnMeta>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub label_names: Vec<String>,
}

pub const SIDECAR_VERSION: u32 = 1;

impl Sidecar {
    pub fn for_dataset(dataset: &Dataset, config: &DatasetConfig, lineage: Vec<AugmentRecord>) -> Sidecar {
        Sidecar {
            version: SIDECAR_VERSION,
            seed: dataset.seed,
            n_rows: dataset.n_rows,
            config: config.clone(),
            lineage,
            columns: dataset.meta.clone(),
            label_names: dataset.labels.iter().map(|l| l.name.clone()).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::config(format!("sidecar: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Sidecar> {
        serde_json::from_str(text).map_err(|e| Error::config(format!("sidecar: {e}")))
    }

    /// Rebuilds a Dataset from a parsed CSV, validating shape against this
    /// sidecar (column names, label names, row count).
    pub fn attach_csv(&self, raw: &RawCsv) -> Result<Dataset> {
        let expected: Vec<&str> = self
            .columns
            .iter()
            .map(|m| m.name.as_str())
            .chain(self.label_names.iter().map(|s| s.as_str()))
            .collect();
        let got: Vec<&str> = raw.header.iter().map(|s| s.as_str()).collect();
        if expected != got {
            return Err(Error::config(format!(
                "csv/sidecar mismatch: header {got:?} does not match sidecar columns {expected:?}"
            )));
        }
        let n_rows = raw.columns.first().map_or(0, |c| c.len());
        if n_rows != self.n_rows {
            return Err(Error::config(format!(
                "csv/sidecar mismatch: csv has {n_rows} rows, sidecar says {}",
                self.n_rows
            )));
        }
        let n_feat = self.columns.len();
        let dataset = Dataset {
            n_rows,
            columns: raw.columns[..n_feat].to_vec(),
            meta: self.columns.clone(),
            labels: self
                .label_names
                .iter()
                .zip(&raw.columns[n_feat..])
                .map(|(name, values)| LabelColumn {
                    name: name.clone(),
                    values: values.clone(),
                })
                .collect(),
            seed: self.seed,
        };
        dataset.check_invariants()?;
        Ok(dataset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Dataset {
        Dataset {
            n_rows: 2,
            columns: vec![vec![0, 1], vec![2, MISSING]],
            meta: vec![
                ColumnMeta {
                    name: "a".into(),
                    cardinality: 2,
                    origin: ColumnOrigin::Feature {
                        distribution: Distribution::Uniform,
                    },
                    noise: vec![],
                },
                ColumnMeta {
                    name: "b".into(),
                    cardinality: 3,
                    origin: ColumnOrigin::Feature {
                        distribution: Distribution::Uniform,
                    },
                    noise: vec![],
                },
            ],
            labels: vec![LabelColumn {
                name: "label".into(),
                values: vec![1, 0],
            }],
            seed: 7,
        }
    }

    #[test]
    fn csv_layout_is_fixed() {
        let csv = String::from_utf8(tiny().csv_bytes()).unwrap();
        assert_eq!(csv, "a,b,label\n0,2,1\n1,-1,0\n");
    }

    #[test]
    fn csv_parses_back() {
        let d = tiny();
        let raw = RawCsv::parse(&d.csv_bytes()).unwrap();
        assert_eq!(raw.header, vec!["a", "b", "label"]);
        assert_eq!(raw.columns[1], vec![2, MISSING]);
    }

    #[test]
    fn drop_rebases_metadata() {
        let mut d = tiny();
        d.drop_columns(&[0]).unwrap();
        assert_eq!(d.n_columns(), 1);
        assert_eq!(d.column_name(0), "b");
        assert_eq!(d.labels.len(), 1);
    }

    #[test]
    fn drop_empty_is_identity() {
        let mut d = tiny();
        let before = d.clone();
        d.drop_columns(&[]).unwrap();
        assert_eq!(d, before);
    }

    #[test]
    fn drop_out_of_range_is_config_error() {
        let mut d = tiny();
        assert!(matches!(d.drop_columns(&[5]), Err(Error::Config(_))));
    }

    #[test]
    fn invariants_catch_domain_violation() {
        let mut d = tiny();
        d.columns[0][0] = 9;
        assert!(d.check_invariants().is_err());
    }
}
