//! Distinct-count estimation: exact set baseline, HyperLogLog, and a cached
//! counter that stays exact until a user-set memory budget.

pub mod bench;
pub mod cached;
pub mod hll;

pub use bench::{bench_columns, Algorithm, AlgorithmSummary, BenchParams, BenchReport, BenchRow};
pub use cached::{CachedCounter, CounterMode};
pub use hll::{item_hash, HllSketch, MAX_PRECISION, MIN_PRECISION};
