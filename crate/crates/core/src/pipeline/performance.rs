//! Algorithm performance records and good/bad labels.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

pub const PERFORMANCE_HEADER: [&str; 4] = ["instance", "algorithm", "run", "hv"];
/// A good algorithm's mean HV must be at least this fraction of the best.
pub const GOOD_FRACTION: f64 = 0.99;

/// Hypervolume of one run of one algorithm on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceRecord {
    pub instance: String,
    pub algorithm: String,
    pub run: u64,
    pub hv: f64,
}

/// A row-numbered problem found while validating a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    /// File line numbers (header = 1); empty for file-level findings.
    pub rows: Vec<usize>,
    pub message: String,
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.rows.as_slice() {
            [] => write!(f, "{}", self.message),
            [r] => write!(f, "row {r}: {}", self.message),
            rows => {
                let list: Vec<String> = rows.iter().map(usize::to_string).collect();
                write!(f, "rows {}: {}", list.join(", "), self.message)
            }
        }
    }
}

/// Parses a performance CSV, collecting every problem instead of stopping at
/// the first. Records are returned only for clean rows.
pub fn scan_performance<R: Read>(reader: R) -> (Vec<PerformanceRecord>, Vec<Finding>) {
    let mut findings = Vec::new();
    let mut records = Vec::new();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut iter = rdr.records();
    match iter.next() {
        None => {
            findings.push(Finding {
                rows: vec![],
                message: "empty file".into(),
            });
            return (records, findings);
        }
        Some(Err(e)) => {
            findings.push(Finding {
                rows: vec![1],
                message: e.to_string(),
            });
            return (records, findings);
        }
        Some(Ok(h)) => {
            let cols: Vec<&str> = h.iter().map(str::trim).collect();
            if cols != PERFORMANCE_HEADER {
                findings.push(Finding {
                    rows: vec![1],
                    message: format!("header must be {}", PERFORMANCE_HEADER.join(",")),
                });
                return (records, findings);
            }
        }
    }
    let mut seen: HashMap<(String, String, u64), usize> = HashMap::new();
    for (i, rec) in iter.enumerate() {
        let row = i + 2;
        let mut bad = |message: String| {
            findings.push(Finding {
                rows: vec![row],
                message,
            })
        };
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                bad(e.to_string());
                continue;
            }
        };
        if rec.len() != 4 {
            bad(format!("expected 4 fields, got {}", rec.len()));
            continue;
        }
        let run = match rec[2].trim().parse::<u64>() {
            Ok(r) => r,
            Err(_) => {
                bad(format!("run '{}' is not a non-negative integer", rec[2].trim()));
                continue;
            }
        };
        let hv = match rec[3].trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => v,
            Ok(v) => {
                bad(format!("hv {v} must be finite and non-negative"));
                continue;
            }
            Err(_) => {
                bad(format!("hv '{}' is not a number", rec[3].trim()));
                continue;
            }
        };
        let (instance, algorithm) = (rec[0].trim().to_owned(), rec[1].trim().to_owned());
        if instance.is_empty() || algorithm.is_empty() {
            bad("empty instance or algorithm".into());
            continue;
        }
        let key = (instance.clone(), algorithm.clone(), run);
        if let Some(&first) = seen.get(&key) {
            findings.push(Finding {
                rows: vec![first, row],
                message: format!("duplicate record ({instance}, {algorithm}, {run})"),
            });
            continue;
        }
        seen.insert(key, row);
        records.push(PerformanceRecord {
            instance,
            algorithm,
            run,
            hv,
        });
    }
    (records, findings)
}

/// Reads a performance CSV, failing on the first finding.
pub fn read_performance(path: &Path) -> Result<Vec<PerformanceRecord>> {
    let (records, findings) = scan_performance(std::fs::File::open(path)?);
    match findings.into_iter().next() {
        None => Ok(records),
        Some(f) => Err(Error::Parse {
            path: path.to_path_buf(),
            row: f.rows.first().copied().unwrap_or(1),
            message: f.message,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmScore {
    pub mean_hv: f64,
    pub normalized_hv: f64,
    pub good: bool,
}

/// Per-instance, per-algorithm scores. Both maps are ordered by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Labels {
    pub algorithms: Vec<String>,
    pub scores: BTreeMap<String, BTreeMap<String, AlgorithmScore>>,
}

impl Labels {
    pub fn instances(&self) -> impl Iterator<Item = &str> {
        self.scores.keys().map(String::as_str)
    }

    pub fn score(&self, instance: &str, algorithm: &str) -> Option<&AlgorithmScore> {
        self.scores.get(instance)?.get(algorithm)
    }

    /// Normalised HV of one algorithm over `instances`; absent entries are 0.
    pub fn normalized_column(&self, algorithm: &str, instances: &[String]) -> Vec<f64> {
        instances
            .iter()
            .map(|i| self.score(i, algorithm).map_or(0.0, |s| s.normalized_hv))
            .collect()
    }

    pub fn good_count(&self, instance: &str) -> usize {
        self.scores
            .get(instance)
            .map_or(0, |m| m.values().filter(|s| s.good).count())
    }
}

/// Labels one instance from its per-algorithm mean HVs.
///
/// `good` requires a positive normalised HV (or a degenerate max = min
/// normalisation), a mean within 1% of the best, and a mean above zero.
pub fn binarize(means: &BTreeMap<String, f64>) -> BTreeMap<String, AlgorithmScore> {
    let lo = means.values().copied().fold(f64::INFINITY, f64::min);
    let hi = means.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let flat = !(hi > lo);
    means
        .iter()
        .map(|(alg, &m)| {
            let normalized_hv = if flat { 0.0 } else { (m - lo) / (hi - lo) };
            let good = (normalized_hv > 0.0 || flat) && m >= GOOD_FRACTION * hi && m > 0.0;
            (
                alg.clone(),
                AlgorithmScore {
                    mean_hv: m,
                    normalized_hv,
                    good,
                },
            )
        })
        .collect()
}

/// Mean HV over runs per (instance, algorithm), then [`binarize`] per instance.
pub fn normalize_and_binarize(records: &[PerformanceRecord]) -> Labels {
    let mut sums: BTreeMap<&str, BTreeMap<&str, (f64, usize)>> = BTreeMap::new();
    let mut algorithms = BTreeSet::new();
    // sort by run so that summation order never depends on file order
    let mut sorted: Vec<&PerformanceRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (&a.instance, &a.algorithm, a.run).cmp(&(&b.instance, &b.algorithm, b.run))
    });
    for r in sorted {
        let e = sums
            .entry(&r.instance)
            .or_default()
            .entry(&r.algorithm)
            .or_insert((0.0, 0));
        e.0 += r.hv;
        e.1 += 1;
        algorithms.insert(r.algorithm.clone());
    }
    let scores = sums
        .into_iter()
        .map(|(inst, algs)| {
            let means = algs
                .into_iter()
                .map(|(a, (s, c))| (a.to_owned(), s / c as f64))
                .collect();
            (inst.to_owned(), binarize(&means))
        })
        .collect();
    Labels {
        algorithms: algorithms.into_iter().collect(),
        scores,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn means(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(a, m)| ((*a).to_owned(), *m)).collect()
    }

    #[test]
    fn one_percent_rule() {
        let s = binarize(&means(&[("best", 0.90), ("close", 0.893), ("weak", 0.5)]));
        assert!(s["best"].good && s["close"].good);
        assert!(!s["weak"].good);
        let s = binarize(&means(&[("best", 0.90), ("far", 0.89)]));
        assert!(!s["far"].good);
    }

    #[test]
    fn zero_hv_is_never_good() {
        let s = binarize(&means(&[("a", 0.0), ("b", 0.0)]));
        assert!(!s["a"].good && !s["b"].good);
        let s = binarize(&means(&[("a", 0.0), ("b", 0.3)]));
        assert!(!s["a"].good && s["b"].good);
    }

    #[test]
    fn single_algorithm_governed_by_one_percent_clause() {
        let s = binarize(&means(&[("only", 0.5)]));
        assert_eq!(s["only"].normalized_hv, 0.0);
        assert!(s["only"].good);
    }

    #[test]
    fn scan_reports_duplicates_with_both_rows() {
        let text = "instance,algorithm,run,hv\np,a,1,0.5\np,a,2,0.6\np,a,1,0.7\n";
        let (recs, findings) = scan_performance(text.as_bytes());
        assert_eq!(recs.len(), 2);
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].rows, vec![2, 4]);
        assert!(findings[0].to_string().starts_with("rows 2, 4:"));
    }

    #[test]
    fn scan_rejects_bad_values() {
        let text = "instance,algorithm,run,hv\np,a,1,-0.5\np,a,x,0.5\np,a,3,nan\n";
        let (recs, findings) = scan_performance(text.as_bytes());
        assert!(recs.is_empty());
        assert_eq!(findings.iter().map(|f| f.rows[0]).collect::<Vec<_>>(), vec![2, 3, 4]);
        let (_, findings) = scan_performance("inst,alg\n".as_bytes());
        assert_eq!(findings[0].rows, vec![1]);
    }

    #[test]
    fn means_over_runs() {
        let recs: Vec<PerformanceRecord> = [("p", "a", 1, 0.2), ("p", "a", 2, 0.4), ("p", "b", 1, 0.1)]
            .iter()
            .map(|(i, a, r, h)| PerformanceRecord {
                instance: (*i).into(),
                algorithm: (*a).into(),
                run: *r,
                hv: *h,
            })
            .collect();
        let l = normalize_and_binarize(&recs);
        assert_eq!(l.algorithms, vec!["a", "b"]);
        let a = l.score("p", "a").unwrap();
        assert!((a.mean_hv - 0.3).abs() < 1e-15);
        assert_eq!(a.normalized_hv, 1.0);
        assert_eq!(l.score("p", "b").unwrap().normalized_hv, 0.0);
        assert_eq!(l.good_count("p"), 1);
        assert_eq!(l.normalized_column("b", &["p".into(), "q".into()]), vec![0.0, 0.0]);
    }
}
