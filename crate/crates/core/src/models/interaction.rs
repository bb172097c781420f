//! Linear-vs-interaction benchmark: eleven dataset variants, each carrying a
//! different set of pairwise combination children of the relevant features,
//! with the parents dropped and categorical noise applied. Both model
//! families train after a small learning-rate grid and report test AUC,
//! accuracy, and log loss.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{
    generate_dataset, CombinationKind, CombinationSpec, Dataset, DatasetConfig, Distribution,
    FeatureSpec, NoiseMode, NoiseSpec, TargetKind, TargetSpec,
};
use crate::models::encode::SparseDesign;
use crate::models::metrics::{accuracy_and_log_loss, auc};
use crate::models::{FmModel, LinearModel, TrainConfig};
use crate::rng::{derive_seed, rng_from_seed, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Linear,
    Fm,
}

impl ModelKind {
    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::Fm => "fm",
        }
    }

    pub const ALL: [ModelKind; 2] = [ModelKind::Linear, ModelKind::Fm];
}

/// Training protocol: a fixed epoch budget and a small learning-rate grid
/// tuned on a validation fifth of the training split.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainProtocol {
    pub epochs: usize,
    pub learning_rates: Vec<f64>,
    pub k: usize,
    pub init_scale: f64,
    pub l2: f64,
    /// Optional feature hashing width for the encoder.
    pub hashed_dims: Option<u32>,
}

impl Default for TrainProtocol {
    fn default() -> Self {
        TrainProtocol {
            epochs: 1,
            learning_rates: vec![0.01, 0.05, 0.1],
            k: 8,
            init_scale: 0.01,
            l2: 1e-6,
            hashed_dims: None,
        }
    }
}

impl TrainProtocol {
    fn config(&self, learning_rate: f64, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate,
            epochs: self.epochs,
            l2: self.l2,
            k: self.k,
            init_scale: self.init_scale,
            seed,
            shuffle: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.learning_rates.is_empty() {
            return Err(Error::config("protocol: learning_rates must not be empty"));
        }
        self.config(self.learning_rates[0], 0).validate()
    }
}

/// One (config, model) result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsRow {
    pub config_id: String,
    pub model: String,
    pub auc: f64,
    pub accuracy: f64,
    pub log_loss: f64,
    pub split_seed: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rows: Vec<MetricsRow>,
}

impl MetricsReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("config_id,model,auc,accuracy,log_loss,split_seed\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.config_id, r.model, r.auc, r.accuracy, r.log_loss, r.split_seed
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::usage(format!("metrics report: {e}")))
    }

    pub fn get(&self, config_id: &str, model: ModelKind) -> Option<&MetricsRow> {
        self.rows
            .iter()
            .find(|r| r.config_id == config_id && r.model == model.label())
    }
}

/// One test-row prediction, dumped so reported AUC gaps can be recomputed
/// from raw scores.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionRow {
    pub config_id: String,
    pub model: String,
    pub row: usize,
    pub score: f64,
    pub label: i64,
}

pub fn predictions_to_csv(rows: &[PredictionRow]) -> String {
    let mut out = String::from("config_id,model,row,score,label\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.config_id, r.model, r.row, r.score, r.label
        ));
    }
    out
}

#[derive(Debug, Clone)]
pub struct InteractionOutcome {
    pub metrics: MetricsReport,
    pub predictions: Vec<PredictionRow>,
}

/// Shape of the initial dataset: a few relevant features wired into a
/// nonlinear target, a wall of irrelevant features, and categorical noise.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BaseParams {
    pub n_rows: usize,
    pub n_relevant: usize,
    pub n_irrelevant: usize,
    pub relevant_cardinality: u64,
    pub irrelevant_cardinality: u64,
    pub noise_p: f64,
    pub seed: u64,
}

impl Default for BaseParams {
    fn default() -> Self {
        BaseParams {
            n_rows: 10_000,
            n_relevant: 4,
            n_irrelevant: 750,
            relevant_cardinality: 16,
            irrelevant_cardinality: 16,
            noise_p: 0.2,
            seed: 0,
        }
    }
}

impl BaseParams {
    /// Builds the base config: REL* features, IRR* features, a nonlinear
    /// target over the relevant block, and one categorical-noise pass.
    pub fn base_dataset_config(&self) -> DatasetConfig {
        let mut features = Vec::with_capacity(self.n_relevant + self.n_irrelevant);
        for i in 0..self.n_relevant {
            features.push(FeatureSpec::new(
                format!("REL{i}"),
                self.relevant_cardinality,
                Distribution::Uniform,
            ));
        }
        for i in 0..self.n_irrelevant {
            features.push(FeatureSpec::new(
                format!("IRR{i}"),
                self.irrelevant_cardinality,
                Distribution::Uniform,
            ));
        }
        let relevant: Vec<usize> = (0..self.n_relevant).collect();
        DatasetConfig {
            n_rows: self.n_rows,
            features,
            correlations: vec![],
            combinations: vec![],
            targets: vec![TargetSpec::new(TargetKind::Nonlinear, relevant)],
            noise: if self.noise_p > 0.0 {
                vec![NoiseSpec {
                    p: self.noise_p,
                    mode: NoiseMode::Categorical,
                    columns: None,
                }]
            } else {
                vec![]
            },
            drop_after_combine: vec![],
            seed: self.seed,
        }
    }
}

fn kind_prefix(kind: &CombinationKind) -> &'static str {
    match kind {
        CombinationKind::And => "AND",
        CombinationKind::Or => "OR",
        CombinationKind::Xor => "XOR",
        CombinationKind::SumOfSquares => "SUM_SQUARES",
        CombinationKind::SquareOfSums => "SQUARE_SUMS",
        CombinationKind::Custom(_) => "CUSTOM",
    }
}

/// The eleven combination sets, in order: AND; OR; XOR; AND,OR; AND,OR,XOR;
/// sum of squares; square of sums; both squares; AND,OR,XOR + sum of
/// squares; AND,OR,XOR + square of sums; everything.
pub fn interaction_kind_sets() -> Vec<(String, Vec<CombinationKind>)> {
    use CombinationKind::*;
    vec![
        ("cfg01_and".into(), vec![And]),
        ("cfg02_or".into(), vec![Or]),
        ("cfg03_xor".into(), vec![Xor]),
        ("cfg04_and_or".into(), vec![And, Or]),
        ("cfg05_and_or_xor".into(), vec![And, Or, Xor]),
        ("cfg06_sum_squares".into(), vec![SumOfSquares]),
        ("cfg07_square_sums".into(), vec![SquareOfSums]),
        ("cfg08_both_squares".into(), vec![SumOfSquares, SquareOfSums]),
        (
            "cfg09_and_or_xor_sum_squares".into(),
            vec![And, Or, Xor, SumOfSquares],
        ),
        (
            "cfg10_and_or_xor_square_sums".into(),
            vec![And, Or, Xor, SquareOfSums],
        ),
        (
            "cfg11_all".into(),
            vec![And, Or, Xor, SumOfSquares, SquareOfSums],
        ),
    ]
}

/// Extends a pristine base config with pairwise combination children of the
/// first target's relevant columns — one child per (kind, pair), named
/// `<KIND><pair rank>` with pairs ranked lexicographically — and drops the
/// parents after the target is computed.
pub fn config_with_combinations(
    base: &DatasetConfig,
    kinds: &[CombinationKind],
) -> Result<DatasetConfig> {
    if !base.combinations.is_empty() || !base.drop_after_combine.is_empty() {
        return Err(Error::config(
            "interaction benchmark: base config must not already have combinations or drops",
        ));
    }
    let relevant = base
        .targets
        .first()
        .map(|t| t.relevant.clone())
        .filter(|r| r.len() >= 4)
        .ok_or_else(|| {
            Error::config("interaction benchmark: base config needs a target with >= 4 relevant columns")
        })?;

    let mut config = base.clone();
    for kind in kinds {
        let mut rank = 0usize;
        for a in 0..relevant.len() {
            for b in (a + 1)..relevant.len() {
                config.combinations.push(CombinationSpec {
                    kind: kind.clone(),
                    parents: vec![relevant[a], relevant[b]],
                    new_name: format!("{}{}", kind_prefix(kind), rank),
                });
                rank += 1;
            }
        }
    }
    config.drop_after_combine = relevant;
    Ok(config)
}

/// One trained-and-evaluated model under the protocol.
#[derive(Debug, Clone)]
pub struct EvaluatedModel {
    pub model: ModelKind,
    pub learning_rate: f64,
    pub auc: f64,
    pub accuracy: f64,
    pub log_loss: f64,
    pub test_rows: Vec<usize>,
    pub scores: Vec<f64>,
    pub labels: Vec<i64>,
}

/// Deterministic stratified split: per class, a seeded shuffle sends
/// `test_fraction` of the rows to the test side. Both outputs are sorted.
pub fn stratified_split(
    labels: &[i64],
    test_fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut classes: Vec<i64> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut rng = rng_from_seed(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in classes {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        crate::models::shuffled_order(&mut rows, &mut rng);
        let n_test = (rows.len() as f64 * test_fraction).round() as usize;
        test.extend_from_slice(&rows[..n_test]);
        train.extend_from_slice(&rows[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Trains both model kinds with the protocol: the learning rate is picked
/// per model on a validation fifth of the training split (first grid point
/// wins ties), the winner retrains on the full training split, and metrics
/// come from the held-out test split.
pub fn evaluate_with_protocol(
    design: &SparseDesign,
    labels: &[i64],
    protocol: &TrainProtocol,
    split_seed: u64,
) -> Result<Vec<EvaluatedModel>> {
    protocol.validate()?;
    let (train_rows, test_rows) = stratified_split(labels, 0.2, split_seed);
    let train_labels: Vec<i64> = train_rows.iter().map(|&i| labels[i]).collect();
    let test_labels: Vec<i64> = test_rows.iter().map(|&i| labels[i]).collect();
    let train_design = design.subset_rows(&train_rows);
    let test_design = design.subset_rows(&test_rows);

    // Validation fifth of the training split, for the learning-rate grid.
    let (inner_rows, val_rows) =
        stratified_split(&train_labels, 0.2, derive_seed(split_seed, 1, Stage::Split));
    let inner_design = train_design.subset_rows(&inner_rows);
    let inner_labels: Vec<i64> = inner_rows.iter().map(|&i| train_labels[i]).collect();
    let val_design = train_design.subset_rows(&val_rows);
    let val_labels: Vec<i64> = val_rows.iter().map(|&i| train_labels[i]).collect();

    ModelKind::ALL
        .iter()
        .map(|&model| {
            let train_seed = derive_seed(split_seed, model as u64 + 2, Stage::Split);
            let mut best: Option<(f64, f64)> = None; // (val auc, lr)
            for &lr in &protocol.learning_rates {
                let cfg = protocol.config(lr, train_seed);
                let val_scores = match model {
                    ModelKind::Linear => LinearModel::train(&inner_design, &inner_labels, &cfg)?
                        .predict_proba(&val_design)?,
                    ModelKind::Fm => FmModel::train(&inner_design, &inner_labels, &cfg)?
                        .predict_proba(&val_design)?,
                };
                let val_auc = auc(&val_scores, &val_labels)?;
                if best.map_or(true, |(b, _)| val_auc > b) {
                    best = Some((val_auc, lr));
                }
            }
            let (_, lr) = best.expect("grid is non-empty");
            let cfg = protocol.config(lr, train_seed);
            let scores = match model {
                ModelKind::Linear => LinearModel::train(&train_design, &train_labels, &cfg)?
                    .predict_proba(&test_design)?,
                ModelKind::Fm => {
                    FmModel::train(&train_design, &train_labels, &cfg)?.predict_proba(&test_design)?
                }
            };
            let auc_value = auc(&scores, &test_labels)?;
            let (accuracy, log_loss) = accuracy_and_log_loss(&scores, &test_labels, 0.5);
            Ok(EvaluatedModel {
                model,
                learning_rate: lr,
                auc: auc_value,
                accuracy,
                log_loss,
                test_rows: test_rows.clone(),
                scores,
                labels: test_labels.clone(),
            })
        })
        .collect()
}

/// Runs the full eleven-config benchmark against a pristine base config.
/// Every variant reuses the base seed, so the underlying features and
/// target are shared and only the combination children differ.
pub fn run_interaction_benchmark(
    base: &DatasetConfig,
    protocol: &TrainProtocol,
    seed: u64,
) -> Result<InteractionOutcome> {
    protocol.validate()?;
    let sets = interaction_kind_sets();
    let results: Vec<(Vec<MetricsRow>, Vec<PredictionRow>)> = sets
        .par_iter()
        .enumerate()
        .map(|(index, (config_id, kinds))| {
            let config = config_with_combinations(base, kinds)?;
            let dataset = generate_dataset(&config)?;
            let labels = dataset
                .label_values()
                .ok_or_else(|| Error::config("interaction benchmark: dataset has no labels"))?
                .to_vec();
            let design = SparseDesign::encode(&dataset, protocol.hashed_dims)?;
            let split_seed = derive_seed(seed, index as u64, Stage::Split);
            let evaluated = evaluate_with_protocol(&design, &labels, protocol, split_seed)?;
            let mut rows = Vec::new();
            let mut predictions = Vec::new();
            for e in evaluated {
                rows.push(MetricsRow {
                    config_id: config_id.clone(),
                    model: e.model.label().to_owned(),
                    auc: e.auc,
                    accuracy: e.accuracy,
                    log_loss: e.log_loss,
                    split_seed,
                });
                for ((&row, &score), &label) in e.test_rows.iter().zip(&e.scores).zip(&e.labels) {
                    predictions.push(PredictionRow {
                        config_id: config_id.clone(),
                        model: e.model.label().to_owned(),
                        row,
                        score,
                        label,
                    });
                }
            }
            Ok((rows, predictions))
        })
        .collect::<Result<_>>()?;

    let mut metrics = MetricsReport::default();
    let mut predictions = Vec::new();
    for (rows, preds) in results {
        metrics.rows.extend(rows);
        predictions.extend(preds);
    }
    Ok(InteractionOutcome {
        metrics,
        predictions,
    })
}

/// Reference dataset shape: the relevant block, the irrelevant wall, one
/// pass of categorical noise, nonlinear target — used by tests and the CLI.
pub fn desk_scale_base() -> BaseParams {
    BaseParams {
        n_irrelevant: 100,
        ..BaseParams::default()
    }
}
