//! Feature CSV rows, per-instance aggregation and the power transform.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::features::{canonical_name, FeatureVector};
use crate::stats::yeo_johnson_fit_transform;

/// Name of the optional trailing column listing flagged features (`;`-separated).
pub const DEGENERATE_COLUMN: &str = "degenerate";

/// One feature vector measured on one sample set of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub instance: String,
    pub set: usize,
    pub features: FeatureVector,
}

/// Rows of a feature CSV: `instance,set,<names...>[,degenerate]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

impl FeatureTable {
    /// Builds a table whose columns follow the first row. Rows are sorted by
    /// `(instance, set)`.
    pub fn from_rows(mut rows: Vec<FeatureRow>) -> Result<Self> {
        let names: Vec<String> = rows
            .first()
            .map(|r| r.features.names().map(str::to_owned).collect())
            .unwrap_or_default();
        for r in &rows {
            if r.features.len() != names.len() || names.iter().any(|n| r.features.feature(n).is_none()) {
                return Err(Error::Shape(format!(
                    "feature names of {} set {} differ from the first row",
                    r.instance, r.set
                )));
            }
        }
        rows.sort_by(|a, b| a.instance.cmp(&b.instance).then(a.set.cmp(&b.set)));
        Ok(Self { names, rows })
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["instance".to_owned(), "set".to_owned()];
        header.extend(self.names.iter().cloned());
        header.push(DEGENERATE_COLUMN.into());
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.instance.clone(), r.set.to_string()];
            let mut flagged = Vec::new();
            for name in &self.names {
                let f = r.features.feature(name).expect("checked in from_rows");
                rec.push(f.value.to_string());
                if f.degenerate {
                    flagged.push(name.as_str());
                }
            }
            rec.push(flagged.join(";"));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write(std::fs::File::create(path)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(std::fs::File::open(path)?, path)
    }

    /// Parses a feature CSV. Row numbers in errors count the header as row 1.
    pub fn read<R: Read>(reader: R, path: &Path) -> Result<Self> {
        let parse_err = |row: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            row,
            message,
        };
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
        let mut records = rdr.records();
        let header = records
            .next()
            .ok_or_else(|| parse_err(1, "empty file".into()))??;
        let cols: Vec<&str> = header.iter().map(str::trim).collect();
        if cols.len() < 2 || cols[0] != "instance" || cols[1] != "set" {
            return Err(parse_err(1, "header must start with instance,set".into()));
        }
        let has_flags = cols.last() == Some(&DEGENERATE_COLUMN);
        let end = cols.len() - usize::from(has_flags);
        let names: Vec<String> = cols[2..end].iter().map(|s| (*s).to_owned()).collect();
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(parse_err(1, format!("duplicate column '{dup}'")));
        }

        let mut rows = Vec::new();
        for (i, rec) in records.enumerate() {
            let row = i + 2;
            let rec = rec?;
            if rec.len() != cols.len() {
                return Err(parse_err(row, format!("expected {} fields, got {}", cols.len(), rec.len())));
            }
            let set = rec[1]
                .trim()
                .parse::<usize>()
                .map_err(|e| parse_err(row, format!("set '{}': {e}", &rec[1])))?;
            let flagged: Vec<&str> = if has_flags {
                rec[end].split(';').map(str::trim).filter(|s| !s.is_empty()).collect()
            } else {
                Vec::new()
            };
            let mut fv = FeatureVector::new();
            for (k, name) in names.iter().enumerate() {
                let raw = rec[k + 2].trim();
                let v: f64 = raw
                    .parse()
                    .map_err(|_| parse_err(row, format!("{name}: '{raw}' is not a number")))?;
                if !v.is_finite() {
                    return Err(parse_err(row, format!("{name}: non-finite value")));
                }
                fv.put(name, v, flagged.contains(&name.as_str()));
            }
            rows.push(FeatureRow {
                instance: rec[0].trim().to_owned(),
                set,
                features: fv,
            });
        }
        Self::from_rows(rows)
    }
}

/// Elementwise mean over runs, skipping flagged entries. An entry flagged in
/// every run becomes a flagged 0.
pub fn aggregate_features(runs: &[FeatureVector]) -> Result<FeatureVector> {
    let first = runs
        .first()
        .ok_or_else(|| Error::Argument("no feature vectors to aggregate".into()))?;
    for (i, r) in runs.iter().enumerate() {
        if r.len() != first.len() || first.names().any(|n| r.feature(n).is_none()) {
            return Err(Error::Shape(format!("feature names of run {i} differ from run 0")));
        }
    }
    let mut out = FeatureVector::new();
    for name in first.names() {
        let values: Vec<f64> = runs
            .iter()
            .filter_map(|r| r.feature(name).filter(|f| !f.degenerate).map(|f| f.value))
            .collect();
        if values.is_empty() {
            out.flag(name);
        } else {
            out.set(name, values.iter().sum::<f64>() / values.len() as f64);
        }
    }
    Ok(out)
}

/// One row of features per instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceTable {
    pub instances: Vec<String>,
    pub names: Vec<String>,
    /// `values[i][k]`: feature `k` of instance `i`.
    pub values: Vec<Vec<f64>>,
}

impl InstanceTable {
    pub fn new(instances: Vec<String>, names: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != instances.len() || values.iter().any(|r| r.len() != names.len()) {
            return Err(Error::Shape("instance table dimensions disagree".into()));
        }
        Ok(Self {
            instances,
            names,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Column index of a feature, resolving aliases.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        let canon = canonical_name(name);
        self.names.iter().position(|n| n == name || n == canon)
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[k]).collect()
    }

    /// Keeps only the listed instances, in the given order.
    pub fn select_instances(&self, keep: &[String]) -> Self {
        let mut instances = Vec::new();
        let mut values = Vec::new();
        for id in keep {
            if let Some(i) = self.instances.iter().position(|x| x == id) {
                instances.push(id.clone());
                values.push(self.values[i].clone());
            }
        }
        Self {
            instances,
            names: self.names.clone(),
            values,
        }
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["instance".to_owned()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for (id, row) in self.instances.iter().zip(&self.values) {
            let mut rec = vec![id.clone()];
            rec.extend(row.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Means over sample sets per instance, instances in sorted order.
pub fn aggregate_table(table: &FeatureTable) -> Result<InstanceTable> {
    let mut groups: BTreeMap<&str, Vec<FeatureVector>> = BTreeMap::new();
    for r in &table.rows {
        groups.entry(&r.instance).or_default().push(r.features.clone());
    }
    let mut instances = Vec::with_capacity(groups.len());
    let mut values = Vec::with_capacity(groups.len());
    for (id, runs) in groups {
        let agg = aggregate_features(&runs)?;
        instances.push(id.to_owned());
        values.push(
            table
                .names
                .iter()
                .map(|n| agg.get(n).expect("aggregated over table names"))
                .collect(),
        );
    }
    InstanceTable::new(instances, table.names.clone(), values)
}

/// Outcome of [`transform_features`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TransformReport {
    /// Fitted lambda per feature, in column order. Empty when skipped.
    pub lambdas: IndexMap<String, f64>,
    pub skipped: bool,
}

/// Yeo-Johnson fit and standardisation of every column. Tables with fewer
/// than three instances are left unchanged.
pub fn transform_features(table: &InstanceTable) -> Result<(InstanceTable, TransformReport)> {
    if table.len() < 3 {
        log::warn!(
            "power transform skipped: {} instance(s), at least 3 needed",
            table.len()
        );
        return Ok((
            table.clone(),
            TransformReport {
                lambdas: IndexMap::new(),
                skipped: true,
            },
        ));
    }
    let fits = crate::par::map_range(table.names.len(), |k| yeo_johnson_fit_transform(&table.column(k)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut out = table.clone();
    let mut lambdas = IndexMap::with_capacity(fits.len());
    for (k, fit) in fits.into_iter().enumerate() {
        for (i, v) in fit.transformed.into_iter().enumerate() {
            out.values[i][k] = v;
        }
        lambdas.insert(table.names[k].clone(), fit.lambda);
    }
    Ok((
        out,
        TransformReport {
            lambdas,
            skipped: false,
        },
    ))
}
