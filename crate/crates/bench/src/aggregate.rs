use std::path::Path;

use crate::error::{BenchError, Result};
use crate::plan::Method;
use crate::records::{create, csv_err, fmt_f64, open, RunRow};

pub const AGGREGATE_VERSION: u32 = 1;
const ESTIMATOR_NOTE: &str = "quantiles: linear interpolation between order statistics, h = (n-1)p; \
non-finite values are excluded and counted in failure_rate";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    CumulativeCost,
    Smoothness,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::CumulativeCost, Metric::Smoothness];

    pub fn id(self) -> &'static str {
        match self {
            Metric::CumulativeCost => "cumulative_cost",
            Metric::Smoothness => "smoothness",
        }
    }

    pub fn from_id(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.id() == s)
    }

    pub fn of(self, row: &RunRow) -> f64 {
        match self {
            Metric::CumulativeCost => row.cumulative_cost,
            Metric::Smoothness => row.smoothness,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub method: Method,
    pub n: usize,
    pub metric: Metric,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    /// Runs in the cell, finite or not.
    pub runs: usize,
    pub failure_rate: f64,
    pub success_rate: f64,
}

/// Quantile of ascending data by linear interpolation between order
/// statistics at position `(n−1)p`.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Median and quartiles per `(method, N)` and metric, in first-seen cell
/// order. Cells without a finite value are left out.
pub fn aggregate(rows: &[RunRow]) -> Vec<AggregateRow> {
    let mut cells: Vec<(Method, usize)> = Vec::new();
    for r in rows {
        if !cells.contains(&(r.method, r.n)) {
            cells.push((r.method, r.n));
        }
    }
    let mut out = Vec::new();
    for (method, n) in cells {
        let cell: Vec<&RunRow> = rows.iter().filter(|r| r.method == method && r.n == n).collect();
        let success_rate = cell.iter().filter(|r| r.success).count() as f64 / cell.len() as f64;
        for metric in Metric::ALL {
            let mut vals: Vec<f64> = cell.iter().map(|r| metric.of(r)).filter(|v| v.is_finite()).collect();
            if vals.is_empty() {
                log::warn!("{} N={n}: no finite {} values; cell omitted", method.id(), metric.id());
                continue;
            }
            vals.sort_by(f64::total_cmp);
            out.push(AggregateRow {
                method,
                n,
                metric,
                median: quantile(&vals, 0.5),
                q25: quantile(&vals, 0.25),
                q75: quantile(&vals, 0.75),
                runs: cell.len(),
                failure_rate: (cell.len() - vals.len()) as f64 / cell.len() as f64,
                success_rate,
            });
        }
    }
    out
}

const COLUMNS: [&str; 9] = ["method", "n", "metric", "median", "q25", "q75", "runs", "failure_rate", "success_rate"];

pub fn write_aggregate(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    let mut w = create(path, "aggregate", AGGREGATE_VERSION, &[ESTIMATOR_NOTE])?;
    let e = csv_err(path);
    w.write_record(COLUMNS).map_err(&e)?;
    for r in rows {
        w.write_record([
            r.method.id().to_string(),
            r.n.to_string(),
            r.metric.id().to_string(),
            fmt_f64(r.median),
            fmt_f64(r.q25),
            fmt_f64(r.q75),
            r.runs.to_string(),
            fmt_f64(r.failure_rate),
            fmt_f64(r.success_rate),
        ])
        .map_err(&e)?;
    }
    w.flush().map_err(BenchError::io(path))
}

pub fn read_aggregate(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut r = open(path, "aggregate", AGGREGATE_VERSION)?;
    let e = csv_err(path);
    let data = |reason: String| BenchError::Data { path: path.into(), reason };
    r.records()
        .map(|rec| {
            let rec = rec.map_err(&e)?;
            let f = |i: usize| -> Result<f64> {
                rec.get(i).unwrap_or("").parse().map_err(|_| data(format!("bad number in column {i}")))
            };
            Ok(AggregateRow {
                method: Method::from_id(&rec[0]).ok_or_else(|| data(format!("unknown method `{}`", &rec[0])))?,
                n: rec[1].parse().map_err(|_| data("bad N".into()))?,
                metric: Metric::from_id(&rec[2]).ok_or_else(|| data(format!("unknown metric `{}`", &rec[2])))?,
                median: f(3)?,
                q25: f(4)?,
                q75: f(5)?,
                runs: rec[6].parse().map_err(|_| data("bad run count".into()))?,
                failure_rate: f(7)?,
                success_rate: f(8)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(method: Method, n: usize, cost: f64) -> RunRow {
        RunRow {
            method,
            n,
            run: 0,
            env_seed: 0,
            controller_seed: 0,
            cumulative_cost: cost,
            smoothness: 1.0,
            success: cost < 2.5,
            rollouts: 0,
        }
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.5), 2.0);
        assert_eq!(quantile(&[4.0], 0.25), 4.0);
        assert_eq!(quantile(&[4.0], 0.75), 4.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.25), 1.75);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.5), 2.5);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 1.0), 4.0);
    }

    #[test]
    fn infinity_counts_as_failure() {
        let rows = [1.0, 2.0, 3.0, f64::INFINITY].map(|c| row(Method::Icem, 20, c));
        let agg = aggregate(&rows);
        let cost = agg.iter().find(|a| a.metric == Metric::CumulativeCost).unwrap();
        assert_eq!(cost.median, 2.0);
        assert_eq!(cost.runs, 4);
        assert_eq!(cost.failure_rate, 0.25);
        assert_eq!(cost.success_rate, 0.5);
    }

    #[test]
    fn all_infinite_cell_omitted() {
        let rows = [row(Method::Icem, 20, f64::INFINITY)];
        let agg = aggregate(&rows);
        assert!(agg.iter().all(|a| a.metric != Metric::CumulativeCost));
    }

    #[test]
    fn bookkeeping_two_by_two() {
        let mut rows = Vec::new();
        for m in [Method::Icem, Method::DscemVarV2] {
            for n in [20, 50] {
                for c in [1.0, 2.0, 3.0] {
                    rows.push(row(m, n, c));
                }
            }
        }
        let agg = aggregate(&rows);
        assert_eq!(agg.iter().filter(|a| a.metric == Metric::CumulativeCost).count(), 4);
        assert!(agg.iter().all(|a| a.q25 <= a.median && a.median <= a.q75));
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("aggregate.csv");
        let rows = [0.1, 0.7, 2.9].map(|c| row(Method::DscemCovV3, 40, c));
        let agg = aggregate(&rows);
        write_aggregate(&path, &agg).unwrap();
        assert_eq!(read_aggregate(&path).unwrap(), agg);
    }
}
