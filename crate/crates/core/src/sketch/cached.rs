//! Distinct counting that is exact until a memory budget, probabilistic after.
//!
//! The counter stores item hashes in a set while the set fits inside
//! `cache_limit` entries. The first insert that would grow past the budget
//! replays every cached hash into a fresh HyperLogLog sketch and switches
//! over for good. Because both paths consume the same [`item_hash`], the
//! promoted sketch's registers are identical to a sketch fed the full
//! stream from the start.

use std::collections::HashSet;
use std::hash::{BuildHasherDefault, Hasher};

use crate::error::Result;
use crate::sketch::hll::{item_hash, HllSketch};

/// Hasher for values that are already avalanche-mixed 64-bit hashes;
/// rehashing them would only burn cycles.
#[derive(Default)]
pub struct PrehashedHasher(u64);

impl Hasher for PrehashedHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, _: &[u8]) {
        unreachable!("prehashed sets only store u64 keys")
    }

    fn write_u64(&mut self, v: u64) {
        self.0 = v;
    }
}

type PrehashedSet = HashSet<u64, BuildHasherDefault<PrehashedHasher>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterMode {
    Exact,
    Probabilistic,
}

impl CounterMode {
    pub fn label(&self) -> &'static str {
        match self {
            CounterMode::Exact => "exact",
            CounterMode::Probabilistic => "probabilistic",
        }
    }
}

enum State {
    Exact(PrehashedSet),
    Probabilistic(HllSketch),
}

pub struct CachedCounter {
    state: State,
    cache_limit: usize,
    precision: u8,
    hash_seed: u64,
    /// Most entries ever held in exact mode.
    peak_entries: usize,
}

impl CachedCounter {
    pub fn new(precision: u8, cache_limit: usize, hash_seed: u64) -> Result<CachedCounter> {
        // Validate precision eagerly; promotion must not be able to fail.
        HllSketch::new(precision, hash_seed)?;
        Ok(CachedCounter {
            state: State::Exact(PrehashedSet::default()),
            cache_limit,
            precision,
            hash_seed,
            peak_entries: 0,
        })
    }

    pub fn mode(&self) -> CounterMode {
        match self.state {
            State::Exact(_) => CounterMode::Exact,
            State::Probabilistic(_) => CounterMode::Probabilistic,
        }
    }

    /// The promoted sketch, once in probabilistic mode.
    pub fn sketch(&self) -> Option<&HllSketch> {
        match &self.state {
            State::Exact(_) => None,
            State::Probabilistic(s) => Some(s),
        }
    }

    /// Peak storage units: exact entries while exact, register count after.
    pub fn peak_units(&self) -> usize {
        match &self.state {
            State::Exact(_) => self.peak_entries,
            State::Probabilistic(s) => s.register_count(),
        }
    }

    pub fn insert(&mut self, value: i64) {
        let hash = item_hash(value, self.hash_seed);
        match &mut self.state {
            State::Exact(set) => {
                if set.contains(&hash) {
                    return;
                }
                if set.len() == self.cache_limit {
                    // Budget exceeded: replay the cache into a sketch.
                    let mut sketch = HllSketch::new(self.precision, self.hash_seed)
                        .expect("precision validated in new()");
                    for &h in set.iter() {
                        sketch.insert_hash(h);
                    }
                    sketch.insert_hash(hash);
                    self.state = State::Probabilistic(sketch);
                } else {
                    set.insert(hash);
                    self.peak_entries = self.peak_entries.max(set.len());
                }
            }
            State::Probabilistic(sketch) => sketch.insert_hash(hash),
        }
    }

    /// Exact set size while exact (zero error), HLL estimate after.
    pub fn estimate(&self) -> f64 {
        match &self.state {
            State::Exact(set) => set.len() as f64,
            State::Probabilistic(sketch) => sketch.estimate(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stays_exact_below_budget() {
        let mut c = CachedCounter::new(12, 1000, 0).unwrap();
        for v in 0..999i64 {
            c.insert(v);
        }
        assert_eq!(c.mode(), CounterMode::Exact);
        assert_eq!(c.estimate(), 999.0);
    }

    #[test]
    fn promotes_when_budget_exceeded() {
        let mut c = CachedCounter::new(12, 1000, 0).unwrap();
        for v in 0..1001i64 {
            c.insert(v);
        }
        assert_eq!(c.mode(), CounterMode::Probabilistic);
        let est = c.estimate();
        let rel = (est - 1001.0).abs() / 1001.0;
        assert!(rel < 3.0 * 1.04 / (4096f64).sqrt(), "estimate {est}");
    }

    #[test]
    fn duplicates_never_promote() {
        let mut c = CachedCounter::new(12, 10, 0).unwrap();
        for _ in 0..1_000_000 {
            c.insert(77);
        }
        assert_eq!(c.mode(), CounterMode::Exact);
        assert_eq!(c.estimate(), 1.0);
    }

    #[test]
    fn empty_counter_estimates_zero() {
        let c = CachedCounter::new(12, 10, 0).unwrap();
        assert_eq!(c.estimate(), 0.0);
        assert_eq!(c.peak_units(), 0);
    }

    #[test]
    fn week_of_days_is_exact() {
        let mut c = CachedCounter::new(16, 7, 0).unwrap();
        for day in 0..700i64 {
            c.insert(day % 7);
        }
        assert_eq!(c.mode(), CounterMode::Exact);
        assert_eq!(c.estimate(), 7.0);
    }

    // Exact oracle: forcing promotion keeps the estimate inside the HLL
    // error bound.
    #[test]
    fn promoted_estimate_tracks_truth() {
        let truth = 100_000i64;
        let mut c = CachedCounter::new(14, 1 << 10, 5).unwrap();
        for v in 0..truth {
            c.insert(v);
        }
        assert_eq!(c.mode(), CounterMode::Probabilistic);
        let rel = (c.estimate() - truth as f64).abs() / truth as f64;
        assert!(rel < 3.0 * 1.04 / (16384f64).sqrt(), "rel error {rel}");
    }

    // Promotion transparency at register level.
    #[test]
    fn promotion_replay_equals_single_pass() {
        let mut cached = CachedCounter::new(10, 256, 3).unwrap();
        let mut direct = HllSketch::new(10, 3).unwrap();
        for v in 0..5_000i64 {
            let value = (v * 37) % 2_000; // duplicates included
            cached.insert(value);
            direct.insert_value(value);
        }
        assert_eq!(cached.mode(), CounterMode::Probabilistic);
        assert_eq!(cached.sketch().unwrap().registers(), direct.registers());
    }

    #[test]
    fn peak_units_respects_budget() {
        let mut c = CachedCounter::new(10, 100, 0).unwrap();
        for v in 0..5_000i64 {
            c.insert(v);
        }
        assert_eq!(c.peak_units(), 1 << 10); // registers after promotion
        let mut c2 = CachedCounter::new(10, 100, 0).unwrap();
        for v in 0..50i64 {
            c2.insert(v);
        }
        assert_eq!(c2.peak_units(), 50);
    }
}
