//! Per-run metric rows, per-strategy summaries and their CSV forms.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub schema_version: u32,
    pub cell: String,
    pub graph_id: String,
    pub architecture: String,
    pub strategy: String,
    pub seed: u64,
    pub final_accuracy: f64,
    pub most_likely_accuracy: f64,
    pub total_iterations: usize,
    pub n_stages: usize,
    /// Shot-sampled accuracy of the final state, when requested.
    pub final_shot_accuracy: Option<f64>,
}

/// Five-number summary plus mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    /// Quartiles by linear interpolation between order statistics.
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |f: f64| {
            let pos = f * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(Stats {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            median: q(0.5),
            q1: q(0.25),
            q3: q(0.75),
            min: v[0],
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub strategy: String,
    pub n: usize,
    pub accuracy: Stats,
    pub most_likely: Stats,
    pub iterations: Stats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatSummary {
    pub schema_version: u32,
    pub strategy: String,
    pub n: usize,
    pub acc_mean: f64,
    pub acc_median: f64,
    pub acc_q1: f64,
    pub acc_q3: f64,
    pub acc_min: f64,
    pub acc_max: f64,
    pub ml_mean: f64,
    pub ml_median: f64,
    pub ml_q1: f64,
    pub ml_q3: f64,
    pub ml_min: f64,
    pub ml_max: f64,
    pub iters_mean: f64,
    pub iters_median: f64,
    pub iters_q1: f64,
    pub iters_q3: f64,
    pub iters_min: f64,
    pub iters_max: f64,
}

impl From<&SummaryRow> for FlatSummary {
    fn from(s: &SummaryRow) -> Self {
        let (a, m, i) = (s.accuracy, s.most_likely, s.iterations);
        FlatSummary {
            schema_version: SCHEMA_VERSION,
            strategy: s.strategy.clone(),
            n: s.n,
            acc_mean: a.mean,
            acc_median: a.median,
            acc_q1: a.q1,
            acc_q3: a.q3,
            acc_min: a.min,
            acc_max: a.max,
            ml_mean: m.mean,
            ml_median: m.median,
            ml_q1: m.q1,
            ml_q3: m.q3,
            ml_min: m.min,
            ml_max: m.max,
            iters_mean: i.mean,
            iters_median: i.median,
            iters_q1: i.q1,
            iters_q3: i.q3,
            iters_min: i.min,
            iters_max: i.max,
        }
    }
}

impl From<&FlatSummary> for SummaryRow {
    fn from(f: &FlatSummary) -> Self {
        SummaryRow {
            strategy: f.strategy.clone(),
            n: f.n,
            accuracy: Stats {
                mean: f.acc_mean,
                median: f.acc_median,
                q1: f.acc_q1,
                q3: f.acc_q3,
                min: f.acc_min,
                max: f.acc_max,
            },
            most_likely: Stats {
                mean: f.ml_mean,
                median: f.ml_median,
                q1: f.ml_q1,
                q3: f.ml_q3,
                min: f.ml_min,
                max: f.ml_max,
            },
            iterations: Stats {
                mean: f.iters_mean,
                median: f.iters_median,
                q1: f.iters_q1,
                q3: f.iters_q3,
                min: f.iters_min,
                max: f.iters_max,
            },
        }
    }
}

/// Per-strategy statistics, strategies in first-appearance order.
pub fn aggregate(rows: &[MetricRow]) -> Vec<SummaryRow> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<&MetricRow>> = BTreeMap::new();
    for r in rows {
        if !groups.contains_key(r.strategy.as_str()) {
            order.push(&r.strategy);
        }
        groups.entry(&r.strategy).or_default().push(r);
    }
    order
        .into_iter()
        .map(|name| {
            let g = &groups[name];
            let col = |f: fn(&MetricRow) -> f64| g.iter().map(|r| f(r)).collect::<Vec<_>>();
            SummaryRow {
                strategy: name.to_string(),
                n: g.len(),
                accuracy: Stats::of(&col(|r| r.final_accuracy)).expect("non-empty group"),
                most_likely: Stats::of(&col(|r| r.most_likely_accuracy)).expect("non-empty group"),
                iterations: Stats::of(&col(|r| r.total_iterations as f64)).expect("non-empty group"),
            }
        })
        .collect()
}

/// Accuracy difference to the baseline in percentage points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub schema_version: u32,
    pub strategy: String,
    pub baseline: String,
    pub mean_points: f64,
    pub median_points: f64,
    pub most_likely_mean_points: f64,
    pub iterations_mean_ratio: f64,
}

pub fn improvements(summary: &[SummaryRow], baseline: &str) -> Result<Vec<Improvement>> {
    let base = summary
        .iter()
        .find(|s| s.strategy == baseline)
        .ok_or_else(|| Error::InvalidArgument(format!("baseline {baseline} not in summary")))?;
    Ok(summary
        .iter()
        .map(|s| Improvement {
            schema_version: SCHEMA_VERSION,
            strategy: s.strategy.clone(),
            baseline: baseline.to_string(),
            mean_points: 100.0 * (s.accuracy.mean - base.accuracy.mean),
            median_points: 100.0 * (s.accuracy.median - base.accuracy.median),
            most_likely_mean_points: 100.0 * (s.most_likely.mean - base.most_likely.mean),
            iterations_mean_ratio: s.iterations.mean / base.iterations.mean,
        })
        .collect())
}

pub fn to_csv<T: Serialize>(items: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for it in items {
        w.serialize(it).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Config(format!("{}: {e}", path.display()))))
        .collect()
}

pub fn summary_csv(summary: &[SummaryRow]) -> Result<String> {
    to_csv(&summary.iter().map(FlatSummary::from).collect::<Vec<_>>())
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>> {
    let flat: Vec<FlatSummary> = read_csv(path)?;
    Ok(flat.iter().map(SummaryRow::from).collect())
}

/// Plain-text table for terminal output.
pub fn format_table(summary: &[SummaryRow], improvements: &[Improvement]) -> String {
    let mut out = format!(
        "{:<16} {:>4} {:>9} {:>9} {:>9} {:>10} {:>9}\n",
        "strategy", "n", "acc_mean", "acc_med", "ml_mean", "iters", "Δ_points"
    );
    for s in summary {
        let delta = improvements
            .iter()
            .find(|i| i.strategy == s.strategy)
            .map_or_else(|| "-".to_string(), |i| format!("{:+.2}", i.mean_points));
        out.push_str(&format!(
            "{:<16} {:>4} {:>9.4} {:>9.4} {:>9.4} {:>10.1} {:>9}\n",
            s.strategy, s.n, s.accuracy.mean, s.accuracy.median, s.most_likely.mean, s.iterations.mean, delta
        ));
    }
    out
}
