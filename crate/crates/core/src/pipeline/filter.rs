//! Correlation-based feature filtering.

use crate::pipeline::table::InstanceTable;
use crate::stats::pearson;

/// Features whose best |r| with any algorithm's performance is below this are dropped.
pub const RELEVANCE_THRESHOLD: f64 = 0.3;
/// Feature pairs correlated above this are redundant; one is dropped.
pub const REDUNDANCY_THRESHOLD: f64 = 0.85;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterReport {
    /// Surviving features in name order.
    pub retained: Vec<String>,
    /// Dropped for weak correlation with performance.
    pub weak: Vec<String>,
    /// Dropped as redundant: `(dropped, kept)`.
    pub redundant: Vec<(String, String)>,
}

fn abs_r(a: &[f64], b: &[f64]) -> f64 {
    pearson(a, b).map_or(0.0, f64::abs)
}

/// Two-stage filter.
///
/// First, features with `max_a |r(feature, perf_a)| < 0.3` are dropped. Then
/// the remaining features are scanned in name order; for each pair with
/// `|r| > 0.85` the one less correlated with performance is dropped (the
/// later name on ties). `performance` holds one column per algorithm aligned
/// with the table's instances.
pub fn correlation_filter(table: &InstanceTable, performance: &[Vec<f64>]) -> FilterReport {
    let mut order: Vec<usize> = (0..table.names.len()).collect();
    order.sort_by(|&a, &b| table.names[a].cmp(&table.names[b]));
    let columns: Vec<Vec<f64>> = (0..table.names.len()).map(|k| table.column(k)).collect();
    let relevance: Vec<f64> = crate::par::map(&columns, |c| {
        performance.iter().map(|p| abs_r(c, p)).fold(0.0, f64::max)
    });

    let mut report = FilterReport::default();
    let mut alive = Vec::new();
    for k in order {
        if relevance[k] < RELEVANCE_THRESHOLD {
            report.weak.push(table.names[k].clone());
        } else {
            alive.push(k);
        }
    }
    let mut dropped = vec![false; alive.len()];
    for i in 0..alive.len() {
        if dropped[i] {
            continue;
        }
        for j in i + 1..alive.len() {
            if dropped[j] {
                continue;
            }
            let (a, b) = (alive[i], alive[j]);
            if abs_r(&columns[a], &columns[b]) > REDUNDANCY_THRESHOLD {
                // names are sorted, so on ties `b` is the later one
                if relevance[b] > relevance[a] {
                    dropped[i] = true;
                    report.redundant.push((table.names[a].clone(), table.names[b].clone()));
                    break;
                }
                dropped[j] = true;
                report.redundant.push((table.names[b].clone(), table.names[a].clone()));
            }
        }
    }
    report.retained = alive
        .iter()
        .zip(&dropped)
        .filter(|(_, d)| !**d)
        .map(|(&k, _)| table.names[k].clone())
        .collect();
    report
}
