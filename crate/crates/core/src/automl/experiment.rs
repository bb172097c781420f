//! Feature-selection simulation across dataset sizes, with prefix
//! retraining of both model families on the selected features.

use serde::{Deserialize, Serialize};

use crate::automl::select::{forward_select, surrogate_train_config, EvolutionTrace, SelectionOptions};
use crate::error::{Error, Result};
use crate::generator::{generate_dataset, DatasetConfig};
use crate::models::encode::SparseDesign;
use crate::models::interaction::{
    config_with_combinations, evaluate_with_protocol, BaseParams, MetricsReport, MetricsRow,
    TrainProtocol,
};
use crate::generator::CombinationKind;
use crate::rng::{derive_seed, Stage};

/// Full experiment recipe: dataset shape per size, selection options, and
/// the retraining protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AutomlConfig {
    pub sizes: Vec<usize>,
    pub n_relevant: usize,
    pub n_irrelevant: usize,
    pub relevant_cardinality: u64,
    pub irrelevant_cardinality: u64,
    pub noise_p: f64,
    pub selection: SelectionOptions,
    pub protocol: TrainProtocol,
    pub seed: u64,
}

impl Default for AutomlConfig {
    fn default() -> Self {
        AutomlConfig {
            sizes: vec![10_000, 50_000, 100_000],
            n_relevant: 4,
            n_irrelevant: 900,
            relevant_cardinality: 16,
            irrelevant_cardinality: 16,
            noise_p: 0.2,
            selection: SelectionOptions::default(),
            protocol: TrainProtocol::default(),
            seed: 0,
        }
    }
}

impl AutomlConfig {
    /// Dataset config for one size: all five combination kinds over the
    /// relevant pairs, parents dropped, noise applied.
    pub fn dataset_config(&self, n_rows: usize) -> Result<DatasetConfig> {
        let base = BaseParams {
            n_rows,
            n_relevant: self.n_relevant,
            n_irrelevant: self.n_irrelevant,
            relevant_cardinality: self.relevant_cardinality,
            irrelevant_cardinality: self.irrelevant_cardinality,
            noise_p: self.noise_p,
            seed: self.seed,
        }
        .base_dataset_config();
        config_with_combinations(
            &base,
            &[
                CombinationKind::And,
                CombinationKind::Or,
                CombinationKind::Xor,
                CombinationKind::SumOfSquares,
                CombinationKind::SquareOfSums,
            ],
        )
    }
}

#[derive(Debug, Clone)]
pub struct AutomlOutcome {
    /// One (size, trace) pair per requested size.
    pub traces: Vec<(usize, EvolutionTrace)>,
    /// Both models retrained on every prefix of every trace;
    /// config ids look like `n10000_prefix03`.
    pub prefix_metrics: MetricsReport,
}

/// Runs the experiment: per size, generate the dataset, run forward
/// selection, then retrain both models on each prefix of the selected
/// feature list under the tuned protocol.
pub fn run_automl_experiment(config: &AutomlConfig) -> Result<AutomlOutcome> {
    if config.sizes.is_empty() {
        return Err(Error::usage("automl: sizes must not be empty"));
    }
    let mut traces = Vec::with_capacity(config.sizes.len());
    let mut prefix_metrics = MetricsReport::default();

    for (size_index, &n_rows) in config.sizes.iter().enumerate() {
        let dataset_config = config.dataset_config(n_rows)?;
        let dataset = generate_dataset(&dataset_config)?;
        let labels = dataset
            .label_values()
            .ok_or_else(|| Error::usage("automl: dataset has no labels"))?
            .to_vec();

        let select_seed = derive_seed(config.seed, size_index as u64, Stage::Split);
        let trace = forward_select(
            &dataset,
            &config.selection,
            &surrogate_train_config(select_seed),
            select_seed,
        )?;
        let selected = trace.selected_columns();

        for prefix_len in 1..=selected.len() {
            let subset = &selected[..prefix_len];
            let design = SparseDesign::encode_columns(&dataset, subset, config.protocol.hashed_dims)?;
            let split_seed = derive_seed(select_seed, prefix_len as u64, Stage::Split);
            for evaluated in evaluate_with_protocol(&design, &labels, &config.protocol, split_seed)? {
                prefix_metrics.rows.push(MetricsRow {
                    config_id: format!("n{n_rows}_prefix{prefix_len:02}"),
                    model: evaluated.model.label().to_owned(),
                    auc: evaluated.auc,
                    accuracy: evaluated.accuracy,
                    log_loss: evaluated.log_loss,
                    split_seed,
                });
            }
        }
        traces.push((n_rows, trace));
    }
    Ok(AutomlOutcome {
        traces,
        prefix_metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> AutomlConfig {
        AutomlConfig {
            sizes: vec![400, 600],
            n_irrelevant: 6,
            selection: SelectionOptions {
                budget: 3,
                ..SelectionOptions::default()
            },
            seed: 21,
            ..AutomlConfig::default()
        }
    }

    #[test]
    fn one_trace_per_size_and_prefix_rows_for_both_models() {
        let outcome = run_automl_experiment(&tiny_config()).unwrap();
        assert_eq!(outcome.traces.len(), 2);
        assert_eq!(outcome.traces[0].0, 400);
        assert_eq!(outcome.traces[0].1.steps.len(), 3);
        // 2 sizes * 3 prefixes * 2 models.
        assert_eq!(outcome.prefix_metrics.rows.len(), 12);
        let models: std::collections::HashSet<&str> = outcome
            .prefix_metrics
            .rows
            .iter()
            .map(|r| r.model.as_str())
            .collect();
        assert_eq!(models.len(), 2);
    }

    #[test]
    fn dataset_config_shape_matches_the_recipe() {
        let config = tiny_config().dataset_config(500).unwrap();
        // 4 relevant + 6 irrelevant features; 5 kinds * 6 pairs children.
        assert_eq!(config.features.len(), 10);
        assert_eq!(config.combinations.len(), 30);
        assert_eq!(config.drop_after_combine, vec![0, 1, 2, 3]);
        let d = generate_dataset(&config).unwrap();
        assert_eq!(d.n_columns(), 6 + 30);
        assert!(d.column_index("SUM_SQUARES5").is_some());
        assert!(d.column_index("IRR0").is_some());
    }

    #[test]
    fn experiment_is_deterministic() {
        let a = run_automl_experiment(&tiny_config()).unwrap();
        let b = run_automl_experiment(&tiny_config()).unwrap();
        assert_eq!(a.traces[0].1.steps, b.traces[0].1.steps);
        assert_eq!(a.prefix_metrics.to_csv(), b.prefix_metrics.to_csv());
    }
}
