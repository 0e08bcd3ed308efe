//! Sample CSV ingestion.
//!
//! Header: `x1..xn,f1..fM,g1..gJ,h1..hK[,cv]`. Row numbers in errors are file
//! line numbers, so the header is row 1.

use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::{compute_violation, EvaluatedSolution, ProblemMeta, DEFAULT_EPSILON};
use crate::sampling::{SampleMethod, SampleSet};

/// Tolerance when checking a provided `cv` column against the recomputed value.
pub const CV_CHECK_TOLERANCE: f64 = 1e-9;

/// Column counts declared by a sample CSV header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleLayout {
    pub n: usize,
    pub m: usize,
    pub j: usize,
    pub k: usize,
    pub has_cv: bool,
}

impl SampleLayout {
    pub fn width(&self) -> usize {
        self.n + self.m + self.j + self.k + usize::from(self.has_cv)
    }

    pub fn header(&self) -> Vec<String> {
        let mut cols = Vec::with_capacity(self.width());
        for (prefix, count) in [("x", self.n), ("f", self.m), ("g", self.j), ("h", self.k)] {
            cols.extend((1..=count).map(|i| format!("{prefix}{i}")));
        }
        if self.has_cv {
            cols.push("cv".into());
        }
        cols
    }
}

/// Parses a header into its layout. Blocks must appear in `x, f, g, h` order
/// with consecutive 1-based indices.
pub fn parse_header(header: &[&str]) -> std::result::Result<SampleLayout, String> {
    let mut counts = [0usize; 4];
    let mut block = 0usize;
    let mut has_cv = false;
    for (pos, raw) in header.iter().enumerate() {
        let col = raw.trim();
        if has_cv {
            return Err(format!("column '{col}' after cv"));
        }
        if col == "cv" {
            has_cv = true;
            continue;
        }
        let Some(b) = ["x", "f", "g", "h"].iter().position(|p| col.starts_with(p)) else {
            return Err(format!("unrecognised column '{col}' at position {}", pos + 1));
        };
        if b < block {
            return Err(format!("column '{col}' out of order"));
        }
        block = b;
        let idx: usize = col[1..]
            .parse()
            .map_err(|_| format!("unrecognised column '{col}' at position {}", pos + 1))?;
        if idx != counts[b] + 1 {
            return Err(format!("column '{col}' breaks the 1-based index sequence"));
        }
        counts[b] += 1;
    }
    Ok(SampleLayout {
        n: counts[0],
        m: counts[1],
        j: counts[2],
        k: counts[3],
        has_cv,
    })
}

/// A parsed sample file and any non-fatal findings.
#[derive(Debug, Clone)]
pub struct LoadedSamples {
    pub set: SampleSet,
    pub warnings: Vec<String>,
}

/// Reads a sample CSV for `meta`; `cv` is always recomputed from `g`/`h`.
pub fn load_sample_file(path: impl AsRef<Path>, meta: &ProblemMeta) -> Result<LoadedSamples> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    read_samples(file, path, meta)
}

pub fn read_samples<R: Read>(reader: R, path: &Path, meta: &ProblemMeta) -> Result<LoadedSamples> {
    meta.validate()?;
    let perr = |row: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let layout = parse_header(&header_refs).map_err(|m| perr(1, m))?;
    for (what, got, want) in [
        ("x", layout.n, meta.n),
        ("f", layout.m, meta.m),
        ("g", layout.j, meta.j),
        ("h", layout.k, meta.k),
    ] {
        if got != want {
            return Err(Error::Shape(format!(
                "{}: row 1: {got} {what}-columns but problem {} declares {want}",
                path.display(),
                meta.name
            )));
        }
    }

    let mut solutions = Vec::new();
    let mut warnings = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record?;
        if record.len() != layout.width() {
            return Err(perr(row, format!("expected {} fields, got {}", layout.width(), record.len())));
        }
        let mut values = Vec::with_capacity(record.len());
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| perr(row, format!("column '{}': cannot parse '{field}'", header[c])))?;
            if !v.is_finite() {
                return Err(perr(row, format!("column '{}': non-finite value", header[c])));
            }
            values.push(v);
        }
        let (x, rest) = values.split_at(layout.n);
        let (f, rest) = rest.split_at(layout.m);
        let (g, rest) = rest.split_at(layout.j);
        let (h, rest) = rest.split_at(layout.k);
        if !meta.contains(x) {
            return Err(perr(row, "decision vector outside problem bounds".into()));
        }
        let cv = compute_violation(g, h, DEFAULT_EPSILON).map_err(|e| perr(row, e.to_string()))?;
        if let Some(&given) = rest.first() {
            if (given - cv).abs() > CV_CHECK_TOLERANCE {
                let msg = format!("row {row}: provided cv {given} differs from recomputed {cv}; using recomputed");
                log::warn!("{}: {msg}", path.display());
                warnings.push(msg);
            }
        }
        solutions.push(EvaluatedSolution {
            x: x.to_vec(),
            f: f.to_vec(),
            g: g.to_vec(),
            h: h.to_vec(),
            cv,
        });
    }
    if solutions.is_empty() {
        return Err(perr(1, "no data rows".into()));
    }
    let set = SampleSet::new(Arc::new(meta.clone()), solutions, 0, SampleMethod::ExternalFile)?;
    Ok(LoadedSamples { set, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::lin1;

    fn meta() -> ProblemMeta {
        lin1(2).unwrap().meta().clone()
    }

    fn read(text: &str) -> Result<LoadedSamples> {
        read_samples(text.as_bytes(), Path::new("mem.csv"), &meta())
    }

    #[test]
    fn reads_well_formed_rows() {
        let s = read("x1,x2,f1,f2,g1\n0.5,0.1,0.5,0.5,-0.3\n0.1,0.2,0.1,0.9,0.1\n0.9,0.9,0.9,0.1,-0.7\n").unwrap();
        assert_eq!(s.set.len(), 3);
        assert!((s.set.solutions[1].cv - 0.1).abs() < 1e-15);
        assert_eq!(s.set.method, SampleMethod::ExternalFile);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn objective_arity_mismatch_names_row_1() {
        let err = read("x1,x2,f1,g1\n0.5,0.5,0.5,-0.3\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Shape(_)));
        assert!(msg.contains("row 1"), "{msg}");
    }

    #[test]
    fn inconsistent_cv_is_recomputed_with_warning() {
        let s = read("x1,x2,f1,f2,g1,cv\n0.1,0.2,0.1,0.9,0.1,0.5\n0.5,0.5,0.5,0.5,-0.3,0\n").unwrap();
        assert_eq!(s.warnings.len(), 1);
        assert!(s.warnings[0].contains("row 2"));
        assert!((s.set.solutions[0].cv - 0.1).abs() < 1e-15);
    }

    #[test]
    fn non_finite_and_garbage_report_row() {
        match read("x1,x2,f1,f2,g1\n0.5,0.5,0.5,0.5,-0.3\n0.5,0.5,NaN,0.5,-0.3\n") {
            Err(Error::Parse { row: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match read("x1,x2,f1,f2,g1\n0.5,0.5,abc,0.5,-0.3\n") {
            Err(Error::Parse { row: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_columns_rejected() {
        assert!(read("x1,x2,f1,f2\n0.5,0.5,0.5,0.5\n").is_err());
        assert!(read("x1,x3,f1,f2,g1\n0.5,0.5,0.5,0.5,0\n").is_err());
        assert!(read("x1,x2,f1,f2,g1\n").is_err());
    }

    #[test]
    fn header_layout() {
        let l = parse_header(&["x1", "x2", "f1", "f2", "g1", "h1", "cv"]).unwrap();
        assert_eq!((l.n, l.m, l.j, l.k, l.has_cv), (2, 2, 1, 1, true));
        assert_eq!(l.header().join(","), "x1,x2,f1,f2,g1,h1,cv");
        assert!(parse_header(&["f1", "x1"]).is_err());
        assert!(parse_header(&["x1", "cv", "f1"]).is_err());
    }
}
