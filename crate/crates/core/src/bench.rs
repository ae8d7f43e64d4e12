//! Benchmark aggregation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::solver::Status;

pub const DEFAULT_SGM_SHIFT: f64 = 10.0;

/// Shifted geometric mean `(∏(tᵢ + Δ))^{1/n} - Δ`; zero for an empty set.
pub fn shifted_geometric_mean(times: &[f64], shift: f64) -> f64 {
    if times.is_empty() {
        return 0.0;
    }
    let n = times.len() as f64;
    let product: f64 = times.iter().map(|t| t + shift).product();
    if product.is_finite() && product > 0.0 {
        product.powf(1.0 / n) - shift
    } else {
        let mean_log = times.iter().map(|t| (t + shift).ln()).sum::<f64>() / n;
        mean_log.exp() - shift
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeBucket {
    Small,
    Medium,
    Large,
}

impl SizeBucket {
    pub fn of(nnz: usize) -> Self {
        match nnz {
            0..1_000_000 => SizeBucket::Small,
            1_000_000..10_000_000 => SizeBucket::Medium,
            _ => SizeBucket::Large,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub name: String,
    /// `None` when the instance failed to load or solve.
    pub status: Option<Status>,
    pub iterations: u64,
    pub seconds: f64,
    pub nnz: usize,
    pub bucket: SizeBucket,
    pub error: Option<String>,
}

impl BenchRow {
    pub fn solved(&self) -> bool {
        self.status.is_some_and(|s| !s.is_limit())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BucketCount {
    pub solved: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub rows: Vec<BenchRow>,
    pub time_limit: f64,
    pub shift: f64,
    /// SGM over solve times with unsolved instances counted at the time limit.
    pub sgm: f64,
    pub solved: usize,
    pub by_bucket: BTreeMap<SizeBucket, BucketCount>,
}

impl BenchSummary {
    pub fn new(rows: Vec<BenchRow>, time_limit: f64, shift: f64) -> Self {
        let times: Vec<f64> = rows
            .iter()
            .map(|r| if r.solved() { r.seconds } else { time_limit })
            .collect();
        let mut by_bucket: BTreeMap<SizeBucket, BucketCount> = BTreeMap::new();
        for r in &rows {
            let e = by_bucket.entry(r.bucket).or_default();
            e.total += 1;
            e.solved += usize::from(r.solved());
        }
        Self {
            sgm: shifted_geometric_mean(&times, shift),
            solved: rows.iter().filter(|r| r.solved()).count(),
            rows,
            time_limit,
            shift,
            by_bucket,
        }
    }

    pub fn table(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(8);
        let mut out = format!(
            "{:<width$}  {:<22}  {:>10}  {:>10}\n",
            "instance", "status", "iterations", "seconds"
        );
        for r in &self.rows {
            let status = r.status.map_or("error", Status::as_str);
            out.push_str(&format!(
                "{:<width$}  {:<22}  {:>10}  {:>10.3}\n",
                r.name, status, r.iterations, r.seconds
            ));
        }
        out.push_str(&format!(
            "solved {}/{}  SGM{} = {:.3}s (time limit {}s)\n",
            self.solved,
            self.rows.len(),
            self.shift,
            self.sgm,
            self.time_limit
        ));
        out
    }
}
