//! Degree-2 factorization machine trained by SGD.
//!
//! The pairwise interaction term uses the O(n*k) identity
//!   sum_{a<b} v_a.v_b = 1/2 * sum_f [(sum_a v_{a,f})^2 - sum_a v_{a,f}^2]
//! over the active occurrences of a row, which is exact for any multiset of
//! active indices.

use rand_distr::{Distribution as Sampler, Normal};

use crate::error::{Error, Result};
use crate::models::encode::SparseDesign;
use crate::models::{check_binary_labels, shuffled_order, sigmoid, softplus, TrainConfig};

#[derive(Debug, Clone)]
pub struct FmModel {
    pub bias: f64,
    pub weights: Vec<f64>,
    /// Latent factors, row-major: factor f of dimension i is
    /// `factors[i * k + f]`.
    pub factors: Vec<f64>,
    pub k: usize,
}

/// Sparse gradient of the per-example objective, aligned with the row slice.
#[derive(Debug, Clone, Default)]
pub struct FmGrad {
    pub bias: f64,
    pub weights: Vec<f64>,
    /// k entries per active occurrence.
    pub factors: Vec<f64>,
}

impl FmModel {
    /// Zero weights, factors drawn from N(0, init_scale^2) under the seed.
    pub fn init(n_dims: usize, cfg: &TrainConfig) -> FmModel {
        let mut factors = vec![0.0; n_dims * cfg.k];
        if cfg.init_scale > 0.0 {
            let normal = Normal::new(0.0, cfg.init_scale).expect("finite init scale");
            let mut rng = crate::rng::rng_from_seed(cfg.seed);
            for v in factors.iter_mut() {
                *v = normal.sample(&mut rng);
            }
        }
        FmModel {
            bias: 0.0,
            weights: vec![0.0; n_dims],
            factors,
            k: cfg.k,
        }
    }

    pub fn train(design: &SparseDesign, labels: &[i64], cfg: &TrainConfig) -> Result<FmModel> {
        cfg.validate()?;
        check_binary_labels(design, labels)?;
        let mut model = FmModel::init(design.n_dims, cfg);
        let mut order: Vec<usize> = (0..design.n_rows).collect();
        // Offset keeps the shuffle stream distinct from the init stream.
        let mut rng = crate::rng::rng_from_seed(cfg.seed.wrapping_add(1));
        let mut grad = FmGrad::default();
        let mut sums = vec![0.0f64; cfg.k];
        for _ in 0..cfg.epochs {
            if cfg.shuffle {
                shuffled_order(&mut order, &mut rng);
            }
            for &i in &order {
                let row = design.row(i);
                let y = labels[i] as f64;
                model.grad_into(row, y, cfg.l2, &mut grad, &mut sums);
                model.bias -= cfg.learning_rate * grad.bias;
                for (slot, &idx) in row.iter().enumerate() {
                    model.weights[idx as usize] -= cfg.learning_rate * grad.weights[slot];
                    let base = idx as usize * model.k;
                    for f in 0..model.k {
                        model.factors[base + f] -=
                            cfg.learning_rate * grad.factors[slot * model.k + f];
                    }
                }
            }
        }
        if !model.is_finite() {
            return Err(Error::usage(
                "fm training diverged to non-finite parameters; lower the learning rate",
            ));
        }
        Ok(model)
    }

    #[inline]
    pub fn score(&self, row: &[u32]) -> f64 {
        let mut sums = vec![0.0f64; self.k];
        self.score_with_sums(row, &mut sums)
    }

    /// Score via the fast identity; `sums` is left holding the per-factor
    /// sums S_f over the active occurrences.
    fn score_with_sums(&self, row: &[u32], sums: &mut [f64]) -> f64 {
        let mut s = self.bias;
        sums.fill(0.0);
        let mut square_sum = 0.0f64;
        for &idx in row {
            s += self.weights[idx as usize];
            let base = idx as usize * self.k;
            for (f, acc) in sums.iter_mut().enumerate() {
                let v = self.factors[base + f];
                *acc += v;
                square_sum += v * v;
            }
        }
        let sum_square: f64 = sums.iter().map(|v| v * v).sum();
        s + 0.5 * (sum_square - square_sum)
    }

    /// Per-example objective: logistic loss plus (l2/2) over the active
    /// weights and factors. Bias unregularized.
    pub fn loss(&self, row: &[u32], y: f64, l2: f64) -> f64 {
        let mut sums = vec![0.0f64; self.k];
        let s = self.score_with_sums(row, &mut sums);
        let mut reg = 0.0;
        for &idx in row {
            let w = self.weights[idx as usize];
            reg += w * w;
            let base = idx as usize * self.k;
            for f in 0..self.k {
                let v = self.factors[base + f];
                reg += v * v;
            }
        }
        softplus(s) - y * s + 0.5 * l2 * reg
    }

    /// Analytic gradient of [`FmModel::loss`]; exactly what training applies.
    pub fn grad(&self, row: &[u32], y: f64, l2: f64) -> FmGrad {
        let mut grad = FmGrad::default();
        let mut sums = vec![0.0f64; self.k];
        self.grad_into(row, y, l2, &mut grad, &mut sums);
        grad
    }

    fn grad_into(&self, row: &[u32], y: f64, l2: f64, out: &mut FmGrad, sums: &mut [f64]) {
        let g = sigmoid(self.score_with_sums(row, sums)) - y;
        out.bias = g;
        out.weights.clear();
        out.factors.clear();
        for &idx in row {
            out.weights.push(g + l2 * self.weights[idx as usize]);
            let base = idx as usize * self.k;
            for (f, &s_f) in sums.iter().enumerate() {
                let v = self.factors[base + f];
                out.factors.push(g * (s_f - v) + l2 * v);
            }
        }
    }

    pub fn predict_proba(&self, design: &SparseDesign) -> Result<Vec<f64>> {
        if self.weights.len() != design.n_dims {
            return Err(Error::usage(format!(
                "fm predict: model has {} dims, design has {}",
                self.weights.len(),
                design.n_dims
            )));
        }
        let mut sums = vec![0.0f64; self.k];
        Ok((0..design.n_rows)
            .map(|i| sigmoid(self.score_with_sums(design.row(i), &mut sums)))
            .collect())
    }

    fn is_finite(&self) -> bool {
        self.bias.is_finite()
            && self.weights.iter().all(|w| w.is_finite())
            && self.factors.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_model(n_dims: usize, k: usize, seed: u64) -> FmModel {
        let mut rng = crate::rng::rng_from_seed(seed);
        FmModel {
            bias: rng.random::<f64>() - 0.5,
            weights: (0..n_dims).map(|_| rng.random::<f64>() - 0.5).collect(),
            factors: (0..n_dims * k).map(|_| rng.random::<f64>() - 0.5).collect(),
            k,
        }
    }

    // Brute-force pairwise oracle over occurrence positions.
    fn naive_pairwise(model: &FmModel, row: &[u32]) -> f64 {
        let mut total = 0.0;
        for a in 0..row.len() {
            for b in (a + 1)..row.len() {
                let va = &model.factors[row[a] as usize * model.k..][..model.k];
                let vb = &model.factors[row[b] as usize * model.k..][..model.k];
                total += va.iter().zip(vb).map(|(x, y)| x * y).sum::<f64>();
            }
        }
        total
    }

    fn naive_score(model: &FmModel, row: &[u32]) -> f64 {
        let linear: f64 = row.iter().map(|&i| model.weights[i as usize]).sum();
        model.bias + linear + naive_pairwise(model, row)
    }

    #[test]
    fn fast_identity_matches_naive_double_loop() {
        let model = random_model(40, 8, 1);
        let mut rng = crate::rng::rng_from_seed(2);
        for _ in 0..200 {
            let len = rng.random_range(1..10usize);
            let row: Vec<u32> = (0..len).map(|_| rng.random_range(0..40u32)).collect();
            let fast = model.score(&row);
            let slow = naive_score(&model, &row);
            assert!((fast - slow).abs() < 1e-9, "fast {fast} slow {slow}");
        }
    }

    #[test]
    fn zero_factors_reduce_to_linear_model() {
        let mut model = random_model(20, 1, 3);
        model.factors.fill(0.0);
        let row = [1u32, 5, 9];
        let linear: f64 = row.iter().map(|&i| model.weights[i as usize]).sum();
        assert!((model.score(&row) - (model.bias + linear)).abs() < 1e-12);
    }

    #[test]
    fn training_is_deterministic() {
        use crate::generator::{generate_dataset, DatasetConfig, Distribution, FeatureSpec};
        use crate::models::encode::SparseDesign;
        let d = generate_dataset(&DatasetConfig {
            n_rows: 400,
            features: vec![
                FeatureSpec::new("a", 8, Distribution::Uniform),
                FeatureSpec::new("b", 8, Distribution::Uniform),
            ],
            correlations: vec![],
            combinations: vec![],
            targets: vec![],
            noise: vec![],
            drop_after_combine: vec![],
            seed: 5,
        })
        .unwrap();
        let design = SparseDesign::encode(&d, None).unwrap();
        let labels: Vec<i64> = (0..400).map(|i| ((d.column(0)[i] ^ d.column(1)[i]) > 3) as i64).collect();
        let cfg = TrainConfig {
            epochs: 3,
            ..TrainConfig::default()
        };
        let a = FmModel::train(&design, &labels, &cfg).unwrap();
        let b = FmModel::train(&design, &labels, &cfg).unwrap();
        assert_eq!(a.bias, b.bias);
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.factors, b.factors);
    }
}
