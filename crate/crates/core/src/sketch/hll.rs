//! HyperLogLog over 64-bit item hashes.
//!
//! Registers are stored one byte each; the estimator is the standard
//! harmonic mean with alpha correction, falling back to linear counting in
//! the small range. With 64-bit hashes no large-range correction is needed.
//! Standard error is about 1.04/sqrt(2^p).

use crate::error::{Error, Result};
use crate::rng::mix64;

/// Supported precision range: 2^4 .. 2^18 registers.
pub const MIN_PRECISION: u8 = 4;
pub const MAX_PRECISION: u8 = 18;

/// Hashes one dataset cell value under a seed. Pure, high-avalanche, and
/// shared by the exact and probabilistic paths of [`CachedCounter`], so a
/// promotion replay sees exactly the hashes the sketch would have seen.
///
/// [`CachedCounter`]: crate::sketch::CachedCounter
#[inline]
pub fn item_hash(value: i64, hash_seed: u64) -> u64 {
    mix64(value as u64 ^ mix64(hash_seed))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HllSketch {
    precision: u8,
    hash_seed: u64,
    registers: Vec<u8>,
}

impl HllSketch {
    pub fn new(precision: u8, hash_seed: u64) -> Result<HllSketch> {
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&precision) {
            return Err(Error::config(format!(
                "hll: precision must be in [{MIN_PRECISION}, {MAX_PRECISION}], got {precision}"
            )));
        }
        Ok(HllSketch {
            precision,
            hash_seed,
            registers: vec![0; 1 << precision],
        })
    }

    pub fn precision(&self) -> u8 {
        self.precision
    }

    pub fn hash_seed(&self) -> u64 {
        self.hash_seed
    }

    pub fn registers(&self) -> &[u8] {
        &self.registers
    }

    /// Number of registers, m = 2^p.
    pub fn register_count(&self) -> usize {
        self.registers.len()
    }

    /// Inserts a raw value, hashing it first.
    #[inline]
    pub fn insert_value(&mut self, value: i64) {
        self.insert_hash(item_hash(value, self.hash_seed));
    }

    /// Inserts a pre-computed 64-bit hash: the top p bits pick a register,
    /// and the register keeps the max over 1 + leading zeros of the
    /// remaining 64-p bits (capped at 64-p+1). Idempotent per hash.
    #[inline]
    pub fn insert_hash(&mut self, hash: u64) {
        let p = self.precision;
        let index = (hash >> (64 - p)) as usize;
        let rest = hash << p;
        let rank = 1 + rest.leading_zeros().min((64 - p) as u32) as u8;
        if self.registers[index] < rank {
            self.registers[index] = rank;
        }
    }

    /// Cardinality estimate: alpha-corrected harmonic mean, with linear
    /// counting when the raw estimate is small and zero registers remain.
    pub fn estimate(&self) -> f64 {
        let m = self.registers.len() as f64;
        let mut sum = 0.0f64;
        let mut zeros = 0usize;
        for &r in &self.registers {
            sum += inv_pow2(r);
            zeros += (r == 0) as usize;
        }
        let raw = alpha(self.registers.len()) * m * m / sum;
        if raw <= 2.5 * m && zeros > 0 {
            m * (m / zeros as f64).ln()
        } else {
            raw
        }
    }

    /// Register-wise max of two sketches over the same precision and hash
    /// seed. The merge estimates the concatenated stream.
    pub fn merge(&self, other: &HllSketch) -> Result<HllSketch> {
        if self.precision != other.precision {
            return Err(Error::usage(format!(
                "hll merge: precision mismatch ({} vs {})",
                self.precision, other.precision
            )));
        }
        if self.hash_seed != other.hash_seed {
            return Err(Error::usage("hll merge: hash seed mismatch"));
        }
        let mut out = self.clone();
        for (a, &b) in out.registers.iter_mut().zip(&other.registers) {
            if *a < b {
                *a = b;
            }
        }
        Ok(out)
    }
}

fn alpha(m: usize) -> f64 {
    match m {
        16 => 0.673,
        32 => 0.697,
        64 => 0.709,
        _ => 0.7213 / (1.0 + 1.079 / m as f64),
    }
}

/// 2^-n by subtracting from the IEEE 754 exponent; n <= 61 here.
#[inline]
fn inv_pow2(n: u8) -> f64 {
    f64::from_bits(f64::to_bits(1.0) - ((n as u64) << 52))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn hash_is_pure() {
        assert_eq!(item_hash(12345, 7), item_hash(12345, 7));
        assert_ne!(item_hash(12345, 7), item_hash(12345, 8));
    }

    // mix64 is a bijection, so sequential values cannot collide.
    #[test]
    fn million_sequential_values_no_duplicates() {
        let mut seen = HashSet::with_capacity(1_000_000);
        for v in 0..1_000_000i64 {
            seen.insert(item_hash(v, 42));
        }
        assert_eq!(seen.len(), 1_000_000);
    }

    // Avalanche: flipping one input bit flips >= 20 output bits on average.
    #[test]
    fn hash_avalanche() {
        let mut total_flips = 0u64;
        let trials = 10_000;
        for t in 0..trials {
            let v = (t as i64).wrapping_mul(0x5851_F42D_4C95_7F2D);
            let bit = (t % 64) as i64;
            let a = item_hash(v, 1);
            let b = item_hash(v ^ (1 << bit), 1);
            total_flips += (a ^ b).count_ones() as u64;
        }
        let mean = total_flips as f64 / trials as f64;
        assert!(mean >= 20.0, "mean flips {mean}");
    }

    #[test]
    fn insert_is_idempotent() {
        let mut s = HllSketch::new(10, 0).unwrap();
        let h = item_hash(99, 0);
        s.insert_hash(h);
        let snapshot = s.registers().to_vec();
        s.insert_hash(h);
        assert_eq!(s.registers(), snapshot.as_slice());
    }

    #[test]
    fn bit_layout_places_rank_in_register_zero() {
        let p = 12u8;
        let mut s = HllSketch::new(p, 0).unwrap();
        // Top p bits zero, next bit one: register 0 gets rank 1.
        let h = 1u64 << (64 - p - 1);
        s.insert_hash(h);
        assert!(s.registers()[0] >= 1);
        assert!(s.registers()[1..].iter().all(|&r| r == 0));
    }

    #[test]
    fn register_values_stay_in_range() {
        let p = 6u8;
        let mut s = HllSketch::new(p, 3).unwrap();
        for v in 0..100_000i64 {
            s.insert_value(v);
        }
        let cap = 64 - p + 1;
        assert!(s.registers().iter().all(|&r| r <= cap));
        // All-zero remainder hits the cap exactly.
        let mut t = HllSketch::new(p, 3).unwrap();
        t.insert_hash(0);
        assert_eq!(t.registers()[0], cap);
    }

    #[test]
    fn empty_sketch_estimates_zero() {
        let s = HllSketch::new(14, 0).unwrap();
        assert_eq!(s.estimate(), 0.0);
    }

    // Exact-set oracle at p=14: over 30 seeds, at least 28 estimates land
    // within 3 standard errors of the truth.
    #[test]
    fn estimate_error_within_three_sigma() {
        let truth = 1_000_000usize;
        let bound = 3.0 * 1.04 / (16384f64).sqrt(); // p = 14
        let mut within = 0;
        for seed in 0..30u64 {
            let mut s = HllSketch::new(14, seed).unwrap();
            for v in 0..truth as i64 {
                s.insert_value(v);
            }
            let rel = (s.estimate() - truth as f64).abs() / truth as f64;
            within += (rel < bound) as usize;
        }
        assert!(within >= 28, "only {within}/30 within {bound}");
    }

    #[test]
    fn merge_identity_and_commutativity() {
        let mut a = HllSketch::new(10, 5).unwrap();
        let mut b = HllSketch::new(10, 5).unwrap();
        for v in 0..5_000i64 {
            a.insert_value(v);
            b.insert_value(v + 2_500);
        }
        let empty = HllSketch::new(10, 5).unwrap();
        assert_eq!(a.merge(&empty).unwrap(), a);
        assert_eq!(a.merge(&b).unwrap(), b.merge(&a).unwrap());
    }

    #[test]
    fn merge_rejects_mismatched_sketches() {
        let a = HllSketch::new(10, 5).unwrap();
        assert!(a.merge(&HllSketch::new(11, 5).unwrap()).is_err());
        assert!(a.merge(&HllSketch::new(10, 6).unwrap()).is_err());
    }

    // Register-level comparison: a stream split into 4 shards and merged
    // equals single-pass insertion.
    #[test]
    fn sharded_merge_equals_single_pass() {
        let mut single = HllSketch::new(12, 9).unwrap();
        let mut shards: Vec<HllSketch> = (0..4).map(|_| HllSketch::new(12, 9).unwrap()).collect();
        for v in 0..40_000i64 {
            let value = v.wrapping_mul(7919);
            single.insert_value(value);
            shards[(v % 4) as usize].insert_value(value);
        }
        let merged = shards
            .iter()
            .skip(1)
            .try_fold(shards[0].clone(), |acc, s| acc.merge(s))
            .unwrap();
        assert_eq!(merged.registers(), single.registers());
    }
}
