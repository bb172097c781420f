//! Distinct-count benchmark over dataset columns.

use std::collections::HashSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{Dataset, MISSING};
use crate::sketch::cached::{CachedCounter, CounterMode};
use crate::sketch::hll::HllSketch;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Hash set of raw values; exact, memory grows with cardinality.
    ExactSet,
    /// Plain HyperLogLog.
    Hll,
    /// Exact below the cache budget, HyperLogLog above.
    CachedHll,
}

impl Algorithm {
    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::ExactSet => "exact_set",
            Algorithm::Hll => "hll",
            Algorithm::CachedHll => "cached_hll",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchParams {
    /// HLL precision p; 2^p registers.
    pub precision: u8,
    /// Exact-entry budget for the cached counter.
    pub cache_limit: usize,
    /// Timed repetitions per (column, algorithm); the median is reported.
    pub repeats: usize,
    pub hash_seed: u64,
}

impl Default for BenchParams {
    fn default() -> Self {
        // p=16 keeps the standard error near 0.004; the cache budget
        // matches the register count.
        BenchParams {
            precision: 16,
            cache_limit: 1 << 16,
            repeats: 3,
            hash_seed: 0,
        }
    }
}

/// One (column, algorithm) measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub column: String,
    pub algorithm: Algorithm,
    pub truth: u64,
    pub estimate: f64,
    /// |estimate - truth| / max(truth, 1).
    pub rel_error: f64,
    /// Median wall-clock time of a single-threaded column scan.
    pub time_ns: u64,
    /// Peak storage units: set entries for exact paths, registers for
    /// probabilistic ones.
    pub peak_units: u64,
    /// Final mode of the cached counter; "-" for the other algorithms.
    pub mode: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

/// Per-algorithm quantile summary of a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub columns: usize,
    pub rel_error_p50: f64,
    pub rel_error_p90: f64,
    pub rel_error_max: f64,
    pub time_ns_p50: u64,
    pub time_ns_p90: u64,
    pub time_ns_max: u64,
}

/// Streams every non-missing cell of every column through the requested
/// algorithms. Truth comes from an untimed exact set; timings measure the
/// full scan (build, insert all, estimate) and report the median over
/// `params.repeats` runs. Columns run in parallel; each scan stays
/// single-threaded.
pub fn bench_columns(
    dataset: &Dataset,
    algorithms: &[Algorithm],
    params: &BenchParams,
) -> Result<BenchReport> {
    if algorithms.is_empty() {
        return Err(Error::usage("sketch bench: no algorithms selected"));
    }
    if params.repeats < 1 {
        return Err(Error::usage("sketch bench: repeats must be >= 1"));
    }
    HllSketch::new(params.precision, params.hash_seed)?;

    let mut rows: Vec<Vec<BenchRow>> = Vec::new();
    (0..dataset.n_columns())
        .into_par_iter()
        .map(|j| bench_one_column(dataset, j, algorithms, params))
        .collect_into_vec(&mut rows);
    Ok(BenchReport {
        rows: rows.into_iter().flatten().collect(),
    })
}

fn bench_one_column(
    dataset: &Dataset,
    column: usize,
    algorithms: &[Algorithm],
    params: &BenchParams,
) -> Vec<BenchRow> {
    let values = dataset.column(column);
    let name = dataset.column_name(column).to_owned();

    let mut truth_set: HashSet<i64> = HashSet::new();
    for &v in values {
        if v != MISSING {
            truth_set.insert(v);
        }
    }
    let truth = truth_set.len() as u64;
    drop(truth_set);

    algorithms
        .iter()
        .map(|&algorithm| {
            let mut times = Vec::with_capacity(params.repeats);
            let mut outcome = scan(values, algorithm, params);
            times.push(outcome.elapsed_ns);
            for _ in 1..params.repeats {
                outcome = scan(values, algorithm, params);
                times.push(outcome.elapsed_ns);
            }
            times.sort_unstable();
            let rel_error = (outcome.estimate - truth as f64).abs() / (truth.max(1) as f64);
            BenchRow {
                column: name.clone(),
                algorithm,
                truth,
                estimate: outcome.estimate,
                rel_error,
                time_ns: times[times.len() / 2],
                peak_units: outcome.peak_units,
                mode: outcome.mode.map_or("-".to_owned(), |m| m.label().to_owned()),
            }
        })
        .collect()
}

struct ScanOutcome {
    estimate: f64,
    peak_units: u64,
    mode: Option<CounterMode>,
    elapsed_ns: u64,
}

fn scan(values: &[i64], algorithm: Algorithm, params: &BenchParams) -> ScanOutcome {
    match algorithm {
        Algorithm::ExactSet => {
            let start = Instant::now();
            let mut set: HashSet<i64> = HashSet::new();
            for &v in values {
                if v != MISSING {
                    set.insert(v);
                }
            }
            let estimate = set.len() as f64;
            let elapsed_ns = start.elapsed().as_nanos() as u64;
            ScanOutcome {
                estimate,
                peak_units: set.len() as u64,
                mode: None,
                elapsed_ns,
            }
        }
        Algorithm::Hll => {
            let start = Instant::now();
            let mut sketch = HllSketch::new(params.precision, params.hash_seed)
                .expect("precision validated by bench_columns");
            for &v in values {
                if v != MISSING {
                    sketch.insert_value(v);
                }
            }
            let estimate = sketch.estimate();
            let elapsed_ns = start.elapsed().as_nanos() as u64;
            ScanOutcome {
                estimate,
                peak_units: sketch.register_count() as u64,
                mode: None,
                elapsed_ns,
            }
        }
        Algorithm::CachedHll => {
            let start = Instant::now();
            let mut counter = CachedCounter::new(params.precision, params.cache_limit, params.hash_seed)
                .expect("precision validated by bench_columns");
            for &v in values {
                if v != MISSING {
                    counter.insert(v);
                }
            }
            let estimate = counter.estimate();
            let elapsed_ns = start.elapsed().as_nanos() as u64;
            ScanOutcome {
                estimate,
                peak_units: counter.peak_units() as u64,
                mode: Some(counter.mode()),
                elapsed_ns,
            }
        }
    }
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("column,algorithm,truth,estimate,rel_error,time_ns,peak_units,mode\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.column,
                r.algorithm.label(),
                r.truth,
                r.estimate,
                r.rel_error,
                r.time_ns,
                r.peak_units,
                r.mode
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::usage(format!("bench report: {e}")))
    }

    pub fn summary(&self) -> Vec<AlgorithmSummary> {
        let mut algorithms: Vec<Algorithm> = Vec::new();
        for r in &self.rows {
            if !algorithms.contains(&r.algorithm) {
                algorithms.push(r.algorithm);
            }
        }
        algorithms
            .into_iter()
            .map(|algorithm| {
                let mut errors: Vec<f64> = Vec::new();
                let mut times: Vec<u64> = Vec::new();
                for r in self.rows.iter().filter(|r| r.algorithm == algorithm) {
                    errors.push(r.rel_error);
                    times.push(r.time_ns);
                }
                errors.sort_by(f64::total_cmp);
                times.sort_unstable();
                AlgorithmSummary {
                    algorithm,
                    columns: errors.len(),
                    rel_error_p50: quantile_f64(&errors, 0.5),
                    rel_error_p90: quantile_f64(&errors, 0.9),
                    rel_error_max: errors.last().copied().unwrap_or(0.0),
                    time_ns_p50: quantile_u64(&times, 0.5),
                    time_ns_p90: quantile_u64(&times, 0.9),
                    time_ns_max: times.last().copied().unwrap_or(0),
                }
            })
            .collect()
    }
}

fn quantile_f64(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

fn quantile_u64(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}
