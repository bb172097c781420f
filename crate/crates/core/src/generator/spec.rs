//! Recipe types for dataset generation and augmentation.
//!
//! Everything here is plain data and serializes to JSON, with one exception:
//! the `Custom` variants of [`CombinationKind`] and [`TargetKind`] carry user
//! closures and are an API-only feature — attempting to serialize them is an
//! error, and no JSON config can produce them.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Missing-cell sentinel. Every other cell value is a non-negative code.
pub const MISSING: i64 = -1;

/// Largest supported cardinality; keeps `cardinality - 1` comfortably inside
/// i64 and bitwise-combination bounds inside a u64 shift.
pub const MAX_CARDINALITY: u64 = 1 << 48;

/// Value distribution of a generated feature column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    /// Equiprobable codes.
    Uniform,
    /// Gaussian over codes: round(clip(N((c-1)/2, (c/6)^2))).
    Normal,
    /// Zipf: pmf(k) ∝ (k+1)^(-exponent).
    LongTail { exponent: f64 },
    /// Two Gaussian bumps at c/4 and 3c/4, each with sd c/10.
    Bimodal,
    /// Explicit pmf, one non-negative weight per code; normalized internally.
    Custom { pmf: Vec<f64> },
}

/// Per-column generation recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    /// Number of category codes; the domain is {0..cardinality-1}.
    pub cardinality: u64,
    pub distribution: Distribution,
}

impl FeatureSpec {
    pub fn new(name: impl Into<String>, cardinality: u64, distribution: Distribution) -> Self {
        FeatureSpec {
            name: name.into(),
            cardinality,
            distribution,
        }
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        validate_name(&self.name, path)?;
        if self.cardinality < 1 {
            return Err(Error::config(format!("{path}.cardinality: must be >= 1")));
        }
        if self.cardinality > MAX_CARDINALITY {
            return Err(Error::config(format!(
                "{path}.cardinality: {} exceeds the supported maximum {MAX_CARDINALITY}",
                self.cardinality
            )));
        }
        match &self.distribution {
            Distribution::LongTail { exponent } => {
                if !(exponent.is_finite() && *exponent > 0.0) {
                    return Err(Error::config(format!(
                        "{path}.distribution.exponent: must be a positive finite number"
                    )));
                }
            }
            Distribution::Custom { pmf } => {
                if pmf.len() as u64 != self.cardinality {
                    return Err(Error::config(format!(
                        "{path}.distribution.pmf: length {} does not match cardinality {}",
                        pmf.len(),
                        self.cardinality
                    )));
                }
                if pmf.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(Error::config(format!(
                        "{path}.distribution.pmf: weights must be finite and non-negative"
                    )));
                }
                let sum: f64 = pmf.iter().sum();
                if !(sum > 0.0) {
                    return Err(Error::config(format!(
                        "{path}.distribution.pmf: weights must have a strictly positive sum"
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Row-wise function over a slice of parent cell values.
pub type RowFn = Arc<dyn Fn(&[i64]) -> i64 + Send + Sync>;

/// How a combination column is computed from its parents.
#[derive(Clone)]
pub enum CombinationKind {
    And,
    Or,
    Xor,
    SumOfSquares,
    SquareOfSums,
    /// User function applied to the row-slice of parent values. Must be pure.
    Custom(RowFn),
}

impl CombinationKind {
    pub fn label(&self) -> &'static str {
        match self {
            CombinationKind::And => "and",
            CombinationKind::Or => "or",
            CombinationKind::Xor => "xor",
            CombinationKind::SumOfSquares => "sum_of_squares",
            CombinationKind::SquareOfSums => "square_of_sums",
            CombinationKind::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for CombinationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl PartialEq for CombinationKind {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (CombinationKind::Custom(a), CombinationKind::Custom(b)) => Arc::ptr_eq(a, b),
            _ => self.label() == other.label(),
        }
    }
}

/// Serialized form of the built-in combination kinds.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CombinationKindRepr {
    And,
    Or,
    Xor,
    SumOfSquares,
    SquareOfSums,
}

impl Serialize for CombinationKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            CombinationKind::And => CombinationKindRepr::And,
            CombinationKind::Or => CombinationKindRepr::Or,
            CombinationKind::Xor => CombinationKindRepr::Xor,
            CombinationKind::SumOfSquares => CombinationKindRepr::SumOfSquares,
            CombinationKind::SquareOfSums => CombinationKindRepr::SquareOfSums,
            CombinationKind::Custom(_) => {
                return Err(serde::ser::Error::custom(
                    "custom combination functions cannot be serialized",
                ))
            }
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CombinationKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(match CombinationKindRepr::deserialize(deserializer)? {
            CombinationKindRepr::And => CombinationKind::And,
            CombinationKindRepr::Or => CombinationKind::Or,
            CombinationKindRepr::Xor => CombinationKind::Xor,
            CombinationKindRepr::SumOfSquares => CombinationKind::SumOfSquares,
            CombinationKindRepr::SquareOfSums => CombinationKind::SquareOfSums,
        })
    }
}

/// Appends one column computed row-wise from existing parent columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationSpec {
    pub kind: CombinationKind,
    /// Indices of the parent columns; at least two, all distinct.
    pub parents: Vec<usize>,
    pub new_name: String,
}

impl CombinationSpec {
    pub fn validate(&self, n_columns: usize, path: &str) -> Result<()> {
        validate_name(&self.new_name, &format!("{path}.new_name"))?;
        if self.parents.len() < 2 {
            return Err(Error::config(format!(
                "{path}.parents: need at least 2 parents, got {}",
                self.parents.len()
            )));
        }
        for (i, &p) in self.parents.iter().enumerate() {
            if p >= n_columns {
                return Err(Error::config(format!(
                    "{path}.parents[{i}]: column index {p} out of range (dataset has {n_columns} columns)"
                )));
            }
        }
        let mut sorted = self.parents.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.parents.len() {
            return Err(Error::config(format!(
                "{path}.parents: indices must be distinct"
            )));
        }
        Ok(())
    }
}

/// Appends one column rank-correlated with an existing source column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpec {
    pub source: usize,
    /// Target correlation, in [-1, 1].
    pub rho: f64,
    /// Cardinality of the new column after equal-frequency quantization.
    pub out_cardinality: u64,
    pub new_name: String,
}

impl CorrelationSpec {
    pub fn validate(&self, n_columns: usize, path: &str) -> Result<()> {
        validate_name(&self.new_name, &format!("{path}.new_name"))?;
        if self.source >= n_columns {
            return Err(Error::config(format!(
                "{path}.source: column index {} out of range (dataset has {n_columns} columns)",
                self.source
            )));
        }
        if !(self.rho.is_finite() && self.rho.abs() <= 1.0) {
            return Err(Error::config(format!(
                "{path}.rho: must lie in [-1, 1], got {}",
                self.rho
            )));
        }
        if self.out_cardinality < 2 {
            return Err(Error::config(format!(
                "{path}.out_cardinality: must be >= 2, got {}",
                self.out_cardinality
            )));
        }
        if self.out_cardinality > MAX_CARDINALITY {
            return Err(Error::config(format!(
                "{path}.out_cardinality: {} exceeds the supported maximum {MAX_CARDINALITY}",
                self.out_cardinality
            )));
        }
        Ok(())
    }
}

/// Decision rule that turns rows into labels.
#[derive(Clone)]
pub enum TargetKind {
    /// K-means cluster ids over the standardized selected columns.
    Clustering { k: usize },
    /// 1 iff w·x exceeds the median of w·x, with w drawn once from the seed.
    Linear,
    /// 1 iff (x0 XOR x1) + x2*x3 over the first four relevant columns
    /// exceeds its median.
    Nonlinear,
    /// User decision function over the full row. Must be pure.
    Custom(RowFn),
}

impl TargetKind {
    pub fn label(&self) -> &'static str {
        match self {
            TargetKind::Clustering { .. } => "clustering",
            TargetKind::Linear => "linear",
            TargetKind::Nonlinear => "nonlinear",
            TargetKind::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TargetKindRepr {
    Clustering { k: usize },
    Linear,
    Nonlinear,
}

impl Serialize for TargetKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            TargetKind::Clustering { k } => TargetKindRepr::Clustering { k: *k },
            TargetKind::Linear => TargetKindRepr::Linear,
            TargetKind::Nonlinear => TargetKindRepr::Nonlinear,
            TargetKind::Custom(_) => {
                return Err(serde::ser::Error::custom(
                    "custom decision functions cannot be serialized",
                ))
            }
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TargetKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(match TargetKindRepr::deserialize(deserializer)? {
            TargetKindRepr::Clustering { k } => TargetKind::Clustering { k },
            TargetKindRepr::Linear => TargetKind::Linear,
            TargetKindRepr::Nonlinear => TargetKind::Nonlinear,
        })
    }
}

/// Label-vector recipe.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetSpec {
    #[serde(flatten)]
    pub kind: TargetKind,
    /// Columns the decision rule reads. Clustering falls back to all columns
    /// when this is empty.
    #[serde(default)]
    pub relevant: Vec<usize>,
    /// Label column name; defaults to `label` (then `label2`, ... for
    /// additional targets).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl TargetSpec {
    pub fn new(kind: TargetKind, relevant: Vec<usize>) -> Self {
        TargetSpec {
            kind,
            relevant,
            name: None,
        }
    }

    pub fn validate(&self, n_columns: usize, path: &str) -> Result<()> {
        if let Some(name) = &self.name {
            validate_name(name, &format!("{path}.name"))?;
        }
        for (i, &c) in self.relevant.iter().enumerate() {
            if c >= n_columns {
                return Err(Error::config(format!(
                    "{path}.relevant[{i}]: column index {c} out of range (dataset has {n_columns} columns)"
                )));
            }
        }
        match &self.kind {
            TargetKind::Clustering { k } => {
                if *k < 2 {
                    return Err(Error::config(format!("{path}.k: clustering needs k >= 2")));
                }
            }
            TargetKind::Linear => {
                if self.relevant.is_empty() {
                    return Err(Error::config(format!(
                        "{path}.relevant: linear target needs at least 1 relevant column"
                    )));
                }
            }
            TargetKind::Nonlinear => {
                if self.relevant.len() < 4 {
                    return Err(Error::config(format!(
                        "{path}.relevant: nonlinear target needs at least 4 relevant columns, got {}",
                        self.relevant.len()
                    )));
                }
            }
            TargetKind::Custom(_) => {}
        }
        Ok(())
    }
}

/// Cell corruption mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// Resample the cell uniformly within its column's domain. The resample
    /// may reproduce the original value, so the effective change rate is
    /// p * (1 - 1/c).
    Categorical,
    /// Set the cell to the missing sentinel.
    Missing,
}

/// Per-cell corruption recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Independent per-cell corruption probability, in [0, 1].
    pub p: f64,
    pub mode: NoiseMode,
    /// Column subset to touch; `None` means all columns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<usize>>,
}

impl NoiseSpec {
    pub fn validate(&self, n_columns: usize, path: &str) -> Result<()> {
        if !(self.p.is_finite() && (0.0..=1.0).contains(&self.p)) {
            return Err(Error::config(format!(
                "{path}.p: must lie in [0, 1], got {}",
                self.p
            )));
        }
        if let Some(cols) = &self.columns {
            for (i, &c) in cols.iter().enumerate() {
                if c >= n_columns {
                    return Err(Error::config(format!(
                        "{path}.columns[{i}]: column index {c} out of range (dataset has {n_columns} columns)"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Full recipe for one dataset. Stages run in a fixed order: feature
/// sampling, correlations, combinations, targets, drops, noise. Labels are
/// therefore computed from clean columns, and noise corrupts observations
/// only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub n_rows: usize,
    pub features: Vec<FeatureSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub correlations: Vec<CorrelationSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub combinations: Vec<CombinationSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<TargetSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub noise: Vec<NoiseSpec>,
    /// Columns removed after targets are computed and before noise runs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drop_after_combine: Vec<usize>,
    pub seed: u64,
}

impl DatasetConfig {
    /// Column count after correlations and combinations, before drops.
    pub fn columns_before_drop(&self) -> usize {
        self.features.len() + self.correlations.len() + self.combinations.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rows < 1 {
            return Err(Error::config("n_rows: must be >= 1"));
        }
        if self.features.is_empty() {
            return Err(Error::config("features: must not be empty"));
        }
        for (i, f) in self.features.iter().enumerate() {
            f.validate(&format!("features[{i}]"))?;
        }
        // Correlations see the sampled feature columns; combinations
        // additionally see correlation children and earlier combinations.
        let after_corr = self.features.len() + self.correlations.len();
        for (i, c) in self.correlations.iter().enumerate() {
            c.validate(self.features.len() + i, &format!("correlations[{i}]"))?;
        }
        for (i, c) in self.combinations.iter().enumerate() {
            c.validate(after_corr + i, &format!("combinations[{i}]"))?;
        }
        let total = self.columns_before_drop();
        for (i, t) in self.targets.iter().enumerate() {
            t.validate(total, &format!("targets[{i}]"))?;
        }
        for (i, &d) in self.drop_after_combine.iter().enumerate() {
            if d >= total {
                return Err(Error::config(format!(
                    "drop_after_combine[{i}]: column index {d} out of range (dataset has {total} columns before drop)"
                )));
            }
        }
        let mut drops = self.drop_after_combine.clone();
        drops.sort_unstable();
        drops.dedup();
        if drops.len() != self.drop_after_combine.len() {
            return Err(Error::config("drop_after_combine: indices must be distinct"));
        }
        if drops.len() == total {
            return Err(Error::config(
                "drop_after_combine: cannot drop every column",
            ));
        }
        for (i, n) in self.noise.iter().enumerate() {
            n.validate(total, &format!("noise[{i}]"))?;
        }
        let mut names: Vec<&str> = self
            .features
            .iter()
            .map(|f| f.name.as_str())
            .chain(self.correlations.iter().map(|c| c.new_name.as_str()))
            .chain(self.combinations.iter().map(|c| c.new_name.as_str()))
            .collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("column names must be unique"));
        }
        Ok(())
    }
}

/// Column names are CSV-safe by construction: `[A-Za-z0-9_]+`.
pub fn validate_name(name: &str, path: &str) -> Result<()> {
    if name.is_empty() {
        return Err(Error::config(format!("{path}: name must not be empty")));
    }
    if !name
        .bytes()
        .all(|b| b.is_ascii_alphanumeric() || b == b'_')
    {
        return Err(Error::config(format!(
            "{path}: name {name:?} may only contain [A-Za-z0-9_]"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(name: &str, c: u64) -> FeatureSpec {
        FeatureSpec::new(name, c, Distribution::Uniform)
    }

    #[test]
    fn custom_pmf_length_mismatch_is_rejected() {
        let spec = FeatureSpec::new("f", 3, Distribution::Custom { pmf: vec![1.0, 2.0] });
        assert!(matches!(spec.validate("f"), Err(Error::Config(_))));
    }

    #[test]
    fn custom_pmf_zero_sum_is_rejected() {
        let spec = FeatureSpec::new("f", 2, Distribution::Custom { pmf: vec![0.0, 0.0] });
        assert!(spec.validate("f").is_err());
    }

    #[test]
    fn combination_kind_round_trips_as_json() {
        let json = serde_json::to_string(&CombinationKind::SumOfSquares).unwrap();
        assert_eq!(json, "\"sum_of_squares\"");
        let back: CombinationKind = serde_json::from_str(&json).unwrap();
        assert_eq!(back, CombinationKind::SumOfSquares);
    }

    #[test]
    fn custom_combination_does_not_serialize() {
        let kind = CombinationKind::Custom(Arc::new(|row| row.iter().sum()));
        assert!(serde_json::to_string(&kind).is_err());
    }

    #[test]
    fn target_kind_json_shape() {
        let json = serde_json::to_string(&TargetSpec::new(
            TargetKind::Clustering { k: 3 },
            vec![],
        ))
        .unwrap();
        assert_eq!(json, r#"{"kind":"clustering","k":3,"relevant":[]}"#);
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let config = DatasetConfig {
            n_rows: 10,
            features: vec![uniform("a", 2), uniform("a", 2)],
            correlations: vec![],
            combinations: vec![],
            targets: vec![],
            noise: vec![],
            drop_after_combine: vec![],
            seed: 0,
        };
        assert!(config.validate().is_err());
    }

    #[test]
    fn bad_column_name_is_rejected() {
        assert!(validate_name("has space", "f").is_err());
        assert!(validate_name("has,comma", "f").is_err());
        assert!(validate_name("ok_Name_9", "f").is_ok());
    }
}
