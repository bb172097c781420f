//! Seeded sampling of feature columns.

use rand::Rng;
use rand_distr::{Distribution as Sampler, Normal};

use crate::error::{Error, Result};
use crate::generator::spec::{Distribution, FeatureSpec};
use crate::rng::rng_from_seed;

/// Samples one column of `n_rows` codes in {0..cardinality-1}.
///
/// Deterministic in (spec, n_rows, seed).
pub fn sample_feature(spec: &FeatureSpec, n_rows: usize, seed: u64) -> Result<Vec<i64>> {
    spec.validate(&spec.name)?;
    let c = spec.cardinality;
    let mut rng = rng_from_seed(seed);
    let out = match &spec.distribution {
        Distribution::Uniform => (0..n_rows).map(|_| rng.random_range(0..c) as i64).collect(),
        Distribution::Normal => {
            let mean = (c - 1) as f64 / 2.0;
            let sd = c as f64 / 6.0;
            sample_rounded_normal(&mut rng, n_rows, mean, sd, c)
        }
        Distribution::Bimodal => {
            let sd = c as f64 / 10.0;
            let lo = Normal::new(c as f64 / 4.0, sd).expect("finite parameters");
            let hi = Normal::new(3.0 * c as f64 / 4.0, sd).expect("finite parameters");
            let max = (c - 1) as f64;
            (0..n_rows)
                .map(|_| {
                    let pick_hi = rng.random::<f64>() < 0.5;
                    let x = if pick_hi { hi.sample(&mut rng) } else { lo.sample(&mut rng) };
                    x.clamp(0.0, max).round() as i64
                })
                .collect()
        }
        Distribution::LongTail { exponent } => {
            let weights: Vec<f64> = (0..c).map(|k| ((k + 1) as f64).powf(-exponent)).collect();
            sample_from_weights(&mut rng, n_rows, &weights)?
        }
        Distribution::Custom { pmf } => sample_from_weights(&mut rng, n_rows, pmf)?,
    };
    Ok(out)
}

fn sample_rounded_normal(
    rng: &mut impl Rng,
    n_rows: usize,
    mean: f64,
    sd: f64,
    cardinality: u64,
) -> Vec<i64> {
    let max = (cardinality - 1) as f64;
    if sd <= 0.0 {
        return vec![mean.clamp(0.0, max).round() as i64; n_rows];
    }
    let normal = Normal::new(mean, sd).expect("finite parameters");
    (0..n_rows)
        .map(|_| normal.sample(rng).clamp(0.0, max).round() as i64)
        .collect()
}

/// Inverse-CDF sampling over an explicit weight vector.
fn sample_from_weights(rng: &mut impl Rng, n_rows: usize, weights: &[f64]) -> Result<Vec<i64>> {
    let total: f64 = weights.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::config("pmf weights must have a positive finite sum"));
    }
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w / total;
        cdf.push(acc);
    }
    // Guard against rounding drift at the top end.
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    Ok((0..n_rows)
        .map(|_| {
            let u = rng.random::<f64>();
            cdf.partition_point(|&edge| edge <= u) as i64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::spec::FeatureSpec;

    fn counts(values: &[i64], c: usize) -> Vec<usize> {
        let mut out = vec![0usize; c];
        for &v in values {
            out[v as usize] += 1;
        }
        out
    }

    #[test]
    fn single_category_is_all_zeros() {
        for dist in [
            Distribution::Uniform,
            Distribution::Normal,
            Distribution::Bimodal,
            Distribution::LongTail { exponent: 1.5 },
        ] {
            let spec = FeatureSpec::new("f", 1, dist);
            let col = sample_feature(&spec, 100, 3).unwrap();
            assert!(col.iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = FeatureSpec::new("f", 50, Distribution::LongTail { exponent: 1.2 });
        let a = sample_feature(&spec, 1000, 99).unwrap();
        let b = sample_feature(&spec, 1000, 99).unwrap();
        assert_eq!(a, b);
        let c = sample_feature(&spec, 1000, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn values_stay_in_domain() {
        for dist in [
            Distribution::Uniform,
            Distribution::Normal,
            Distribution::Bimodal,
            Distribution::LongTail { exponent: 0.7 },
        ] {
            let spec = FeatureSpec::new("f", 7, dist.clone());
            let col = sample_feature(&spec, 20_000, 11).unwrap();
            assert!(
                col.iter().all(|&v| (0..7).contains(&v)),
                "{dist:?} escaped the domain"
            );
        }
    }

    // Oracle: normalize the Zipf weights numerically and compare the head
    // frequency. pmf(0) = 1 / sum_{k=1}^{100} k^-1.5.
    #[test]
    fn long_tail_head_frequency_matches_pmf() {
        let c = 100u64;
        let s = 1.5f64;
        let norm: f64 = (1..=c).map(|k| (k as f64).powf(-s)).sum();
        let expected = 1.0 / norm;

        let spec = FeatureSpec::new("f", c, Distribution::LongTail { exponent: s });
        let col = sample_feature(&spec, 100_000, 20260810).unwrap();
        let freq0 = counts(&col, c as usize)[0] as f64 / col.len() as f64;
        assert!(
            (freq0 - expected).abs() < 0.1 * expected,
            "freq0 {freq0} vs expected {expected}"
        );
    }

    #[test]
    fn custom_pmf_respects_weights() {
        let spec = FeatureSpec::new(
            "f",
            4,
            Distribution::Custom {
                pmf: vec![0.0, 1.0, 3.0, 0.0],
            },
        );
        let col = sample_feature(&spec, 40_000, 5).unwrap();
        let n = counts(&col, 4);
        assert_eq!(n[0], 0);
        assert_eq!(n[3], 0);
        let ratio = n[2] as f64 / n[1] as f64;
        assert!((ratio - 3.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn uniform_is_flat() {
        let spec = FeatureSpec::new("f", 10, Distribution::Uniform);
        let col = sample_feature(&spec, 100_000, 1).unwrap();
        for n in counts(&col, 10) {
            assert!((9_000..11_000).contains(&n), "count {n}");
        }
    }
}
