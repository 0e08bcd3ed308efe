//! Meta-data assembly: aggregate, transform, label, filter, project.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};

pub mod export;
pub mod filter;
pub mod performance;
pub mod projection;
pub mod table;

pub use export::export_space;
pub use filter::{correlation_filter, FilterReport};
pub use performance::{normalize_and_binarize, AlgorithmScore, Labels, PerformanceRecord};
pub use projection::{project, InstanceSpace, ProjectionMatrix, SpacePoint};
pub use table::{aggregate_features, aggregate_table, transform_features, FeatureRow, FeatureTable, InstanceTable, TransformReport};

/// Everything produced by [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Per-instance means before the power transform.
    pub aggregated: InstanceTable,
    pub transformed: InstanceTable,
    pub transform: TransformReport,
    pub labels: Labels,
    pub filter: FilterReport,
    pub space: InstanceSpace,
    /// Instances dropped for lack of performance records.
    pub dropped: Vec<String>,
}

/// Runs aggregation, transform, labelling, filtering and projection.
///
/// With no performance records every instance is kept and unlabelled;
/// otherwise instances without records are dropped with a warning.
pub fn run_pipeline(
    features: &FeatureTable,
    performance: &[PerformanceRecord],
    matrix: &ProjectionMatrix,
    sources: &BTreeMap<String, String>,
) -> Result<PipelineOutput> {
    let all = aggregate_table(features)?;
    if all.is_empty() {
        return Err(Error::Argument("feature table has no rows".into()));
    }
    let labels = normalize_and_binarize(performance);
    let (aggregated, dropped) = if performance.is_empty() {
        (all, Vec::new())
    } else {
        let (keep, dropped): (Vec<String>, Vec<String>) = all
            .instances
            .iter()
            .cloned()
            .partition(|id| labels.scores.contains_key(id));
        for id in &dropped {
            log::warn!("instance {id} has no performance records; dropped");
        }
        (all.select_instances(&keep), dropped)
    };
    if aggregated.is_empty() {
        return Err(Error::Argument("no instance has both features and performance records".into()));
    }
    // only the projection needs its features; check before the expensive steps
    matrix.validate()?;
    matrix.columns_in(&aggregated)?;

    let (transformed, transform) = transform_features(&aggregated)?;
    let perf_columns: Vec<Vec<f64>> = labels
        .algorithms
        .iter()
        .map(|a| labels.normalized_column(a, &transformed.instances))
        .collect();
    let filter = if transformed.len() >= 3 {
        correlation_filter(&transformed, &perf_columns)
    } else {
        log::warn!("correlation filter skipped: fewer than 3 instances");
        FilterReport {
            retained: transformed.names.clone(),
            ..FilterReport::default()
        }
    };
    let space = project(&transformed, matrix, &labels, sources)?;
    Ok(PipelineOutput {
        aggregated,
        transformed,
        transform,
        labels,
        filter,
        space,
        dropped,
    })
}

/// Writes `instance,<features...>,<alg>_mean_hv,<alg>_norm_hv,<alg>_good...`.
pub fn write_metadata<W: Write>(out: &PipelineOutput, writer: W) -> Result<()> {
    let t = &out.transformed;
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["instance".to_owned()];
    header.extend(t.names.iter().cloned());
    for a in &out.labels.algorithms {
        header.extend([format!("{a}_mean_hv"), format!("{a}_norm_hv"), format!("{a}_good")]);
    }
    w.write_record(&header)?;
    for (id, row) in t.instances.iter().zip(&t.values) {
        let mut rec = vec![id.clone()];
        rec.extend(row.iter().map(f64::to_string));
        for a in &out.labels.algorithms {
            match out.labels.score(id, a) {
                Some(s) => rec.extend([
                    s.mean_hv.to_string(),
                    s.normalized_hv.to_string(),
                    u8::from(s.good).to_string(),
                ]),
                None => rec.extend([String::new(), String::new(), String::new()]),
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `feature,lambda,retained`.
pub fn write_feature_report<W: Write>(out: &PipelineOutput, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["feature", "lambda", "retained"])?;
    for name in &out.transformed.names {
        let lambda = out.transform.lambdas.get(name).map_or(String::new(), f64::to_string);
        let kept = out.filter.retained.iter().any(|r| r == name);
        w.write_record([name.as_str(), lambda.as_str(), if kept { "1" } else { "0" }])?;
    }
    w.flush()?;
    Ok(())
}
