//! Logistic regression trained by SGD on sparse one-hot rows.

use crate::error::{Error, Result};
use crate::models::encode::SparseDesign;
use crate::models::{check_binary_labels, shuffled_order, sigmoid, softplus, TrainConfig};

#[derive(Debug, Clone)]
pub struct LinearModel {
    pub bias: f64,
    pub weights: Vec<f64>,
}

/// Sparse gradient of the per-example objective.
#[derive(Debug, Clone, Default)]
pub struct LinearGrad {
    pub bias: f64,
    /// One entry per active occurrence, aligned with the row slice.
    pub weights: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(n_dims: usize) -> LinearModel {
        LinearModel {
            bias: 0.0,
            weights: vec![0.0; n_dims],
        }
    }

    /// SGD on the logistic loss with per-step L2 on the active weights.
    /// Row order is reshuffled every epoch from the config seed, so the
    /// result is a pure function of (design, labels, config).
    pub fn train(design: &SparseDesign, labels: &[i64], cfg: &TrainConfig) -> Result<LinearModel> {
        cfg.validate()?;
        check_binary_labels(design, labels)?;
        let mut model = LinearModel::zeros(design.n_dims);
        let mut order: Vec<usize> = (0..design.n_rows).collect();
        let mut rng = crate::rng::rng_from_seed(cfg.seed);
        let mut grad = LinearGrad::default();
        for _ in 0..cfg.epochs {
            if cfg.shuffle {
                shuffled_order(&mut order, &mut rng);
            }
            for &i in &order {
                let row = design.row(i);
                let y = labels[i] as f64;
                model.grad_into(row, y, cfg.l2, &mut grad);
                model.bias -= cfg.learning_rate * grad.bias;
                for (&idx, &g) in row.iter().zip(&grad.weights) {
                    model.weights[idx as usize] -= cfg.learning_rate * g;
                }
            }
        }
        if !model.is_finite() {
            return Err(Error::usage(
                "linear training diverged to non-finite parameters; lower the learning rate",
            ));
        }
        Ok(model)
    }

    #[inline]
    pub fn score(&self, row: &[u32]) -> f64 {
        let mut s = self.bias;
        for &idx in row {
            s += self.weights[idx as usize];
        }
        s
    }

    /// Per-example objective the SGD step descends: logistic loss plus
    /// (l2/2) * sum of squared active weights. The bias is unregularized.
    pub fn loss(&self, row: &[u32], y: f64, l2: f64) -> f64 {
        let s = self.score(row);
        let mut reg = 0.0;
        for &idx in row {
            let w = self.weights[idx as usize];
            reg += w * w;
        }
        softplus(s) - y * s + 0.5 * l2 * reg
    }

    /// Analytic gradient of [`LinearModel::loss`]; exactly what training
    /// applies.
    pub fn grad(&self, row: &[u32], y: f64, l2: f64) -> LinearGrad {
        let mut grad = LinearGrad::default();
        self.grad_into(row, y, l2, &mut grad);
        grad
    }

    fn grad_into(&self, row: &[u32], y: f64, l2: f64, out: &mut LinearGrad) {
        let g = sigmoid(self.score(row)) - y;
        out.bias = g;
        out.weights.clear();
        out.weights
            .extend(row.iter().map(|&idx| g + l2 * self.weights[idx as usize]));
    }

    pub fn predict_proba(&self, design: &SparseDesign) -> Result<Vec<f64>> {
        if self.weights.len() != design.n_dims {
            return Err(Error::usage(format!(
                "linear predict: model has {} dims, design has {}",
                self.weights.len(),
                design.n_dims
            )));
        }
        Ok((0..design.n_rows)
            .map(|i| sigmoid(self.score(design.row(i))))
            .collect())
    }

    fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_dataset, DatasetConfig, Distribution, FeatureSpec};
    use crate::models::metrics::auc;

    fn design_from(cardinality: u64, n_rows: usize, seed: u64) -> (SparseDesign, crate::generator::Dataset) {
        let d = generate_dataset(&DatasetConfig {
            n_rows,
            features: vec![FeatureSpec::new("f", cardinality, Distribution::Uniform)],
            correlations: vec![],
            combinations: vec![],
            targets: vec![],
            noise: vec![],
            drop_after_combine: vec![],
            seed,
        })
        .unwrap();
        (SparseDesign::encode(&d, None).unwrap(), d)
    }

    #[test]
    fn separable_single_column_reaches_high_accuracy() {
        let (design, d) = design_from(2, 400, 1);
        let labels: Vec<i64> = d.column(0).to_vec(); // label equals the code
        let cfg = TrainConfig {
            learning_rate: 0.5,
            epochs: 10,
            ..TrainConfig::default()
        };
        let model = LinearModel::train(&design, &labels, &cfg).unwrap();
        let proba = model.predict_proba(&design).unwrap();
        let correct = proba
            .iter()
            .zip(&labels)
            .filter(|(p, &y)| (**p >= 0.5) as i64 == y)
            .count();
        assert!(correct as f64 / labels.len() as f64 >= 0.99);
    }

    // Permutation baseline: independent labels give chance AUC.
    #[test]
    fn independent_labels_give_chance_auc() {
        let mut aucs = Vec::new();
        for seed in 0..10u64 {
            let (design, _) = design_from(16, 2000, 100 + seed);
            let mut rng = crate::rng::rng_from_seed(999 + seed);
            use rand::Rng;
            let labels: Vec<i64> = (0..2000).map(|_| rng.random_range(0..2i64)).collect();
            let train: Vec<usize> = (0..1600).collect();
            let test: Vec<usize> = (1600..2000).collect();
            let cfg = TrainConfig::default();
            let model =
                LinearModel::train(&design.subset_rows(&train), &labels[..1600], &cfg).unwrap();
            let proba = model.predict_proba(&design.subset_rows(&test)).unwrap();
            let test_labels: Vec<i64> = test.iter().map(|&i| labels[i]).collect();
            aucs.push(auc(&proba, &test_labels).unwrap());
        }
        let mean = aucs.iter().sum::<f64>() / aucs.len() as f64;
        assert!((0.45..=0.55).contains(&mean), "mean auc {mean}");
    }

    #[test]
    fn training_is_deterministic() {
        let (design, d) = design_from(8, 500, 3);
        let labels: Vec<i64> = d.column(0).iter().map(|&v| (v > 3) as i64).collect();
        let cfg = TrainConfig::default();
        let a = LinearModel::train(&design, &labels, &cfg).unwrap();
        let b = LinearModel::train(&design, &labels, &cfg).unwrap();
        assert_eq!(a.bias, b.bias);
        assert_eq!(a.weights, b.weights);
    }

    #[test]
    fn non_binary_labels_are_rejected() {
        let (design, _) = design_from(4, 50, 4);
        let labels = vec![2i64; 50];
        assert!(LinearModel::train(&design, &labels, &TrainConfig::default()).is_err());
    }

    #[test]
    fn zero_model_predicts_half() {
        let (design, _) = design_from(4, 10, 5);
        let model = LinearModel::zeros(design.n_dims);
        let proba = model.predict_proba(&design).unwrap();
        assert!(proba.iter().all(|&p| p == 0.5));
    }

    #[test]
    fn saturated_score_predicts_one() {
        assert!((sigmoid(40.0) - 1.0).abs() < 1e-15);
    }
}
