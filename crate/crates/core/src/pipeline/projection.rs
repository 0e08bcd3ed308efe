//! Linear projection of instances into a two-dimensional space.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::canonical_name;
use crate::pipeline::performance::Labels;
use crate::pipeline::table::InstanceTable;
use crate::stats::is_constant;

/// Number of features in a projection.
pub const PROJECTION_WIDTH: usize = 23;

const BUILTIN: [(&str, f64, f64); PROJECTION_WIDTH] = [
    ("min_cv", -0.0682, -0.2608),
    ("skew_cv", -0.0465, 0.2616),
    ("pop_cv_mdl_r2", 0.1413, -0.0689),
    ("pop_cv_range_coeff", -0.1132, 0.0217),
    ("dist_c_dist_x_avg_rws", -0.2930, -0.1596),
    ("nncv_r1_rws", 0.2010, 0.0430),
    ("bncv_r1_rws", 0.2178, -0.0309),
    ("upo_n", 0.2008, -0.1819),
    ("corr_obj", -0.1996, 0.0440),
    ("mean_f", -0.3420, 0.3035),
    ("skew_f", 0.3196, -0.1020),
    ("f_mdl_r2", 0.2640, 0.0873),
    ("f_range_coeff", 0.1285, 0.0726),
    ("dist_f_dist_x_avg_rws", -0.2986, 0.1138),
    ("cpo_upo_n", -0.2306, 0.2422),
    ("GD_cpo_upo", 0.1911, -0.0884),
    ("hv", 0.1912, 0.0413),
    ("corr_cf", -0.2418, 0.0489),
    ("piz_ob_min", -0.0513, 0.4075),
    ("ps_dist_mean", -0.0465, 0.3733),
    ("nhv_avg_rws", 0.0397, 0.2717),
    ("bhv_avg_rws", 0.2087, -0.1661),
    ("nhv_r1_rws", 0.1462, 0.0967),
];

/// `z = W v` with `W` of shape 2 x 23.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionMatrix {
    #[serde(rename = "featureOrder")]
    pub feature_order: Vec<String>,
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
}

impl ProjectionMatrix {
    /// The published 23-feature instance-space projection.
    pub fn builtin() -> Self {
        Self {
            feature_order: BUILTIN.iter().map(|(n, _, _)| (*n).to_owned()).collect(),
            w: vec![
                BUILTIN.iter().map(|(_, a, _)| *a).collect(),
                BUILTIN.iter().map(|(_, _, b)| *b).collect(),
            ],
        }
    }

    /// Every structural problem with the matrix; empty when valid.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.feature_order.len() != PROJECTION_WIDTH {
            out.push(format!(
                "featureOrder has {} names, expected {PROJECTION_WIDTH}",
                self.feature_order.len()
            ));
        }
        if self.w.len() != 2 {
            out.push(format!("W has {} rows, expected 2", self.w.len()));
        }
        for (r, row) in self.w.iter().enumerate() {
            if row.len() != PROJECTION_WIDTH {
                out.push(format!("W row {} has {} columns, expected {PROJECTION_WIDTH}", r + 1, row.len()));
            }
            if let Some(c) = row.iter().position(|v| !v.is_finite()) {
                out.push(format!("W row {} column {} is not finite", r + 1, c + 1));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for name in &self.feature_order {
            if !seen.insert(canonical_name(name)) {
                out.push(format!("duplicate feature '{name}'"));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.problems().as_slice() {
            [] => Ok(()),
            p => Err(Error::Shape(p.join("; "))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Projects one already-standardised vector in `feature_order`.
    pub fn apply(&self, v: &[f64]) -> [f64; 2] {
        let dot = |row: &[f64]| row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        [dot(&self.w[0]), dot(&self.w[1])]
    }

    /// Table column per projection feature, or the names that are missing.
    pub fn columns_in(&self, table: &InstanceTable) -> Result<Vec<usize>> {
        let mut idx = Vec::with_capacity(self.feature_order.len());
        let mut missing = Vec::new();
        for name in &self.feature_order {
            match table.index_of(name) {
                Some(k) => idx.push(k),
                None => missing.push(name.clone()),
            }
        }
        if missing.is_empty() {
            Ok(idx)
        } else {
            Err(Error::MissingFeatures(missing))
        }
    }
}

/// Z-scores (population standard deviation); a constant column maps to zeros.
pub fn z_scores(column: &[f64]) -> Vec<f64> {
    crate::stats::standardize(column)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpacePoint {
    pub id: String,
    pub z: [f64; 2],
    pub source: String,
    /// Good label per algorithm, aligned with [`InstanceSpace::algorithms`].
    pub good: Vec<bool>,
    pub good_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InstanceSpace {
    pub algorithms: Vec<String>,
    pub points: Vec<SpacePoint>,
}

/// Standardises each projection feature across instances and applies the matrix.
///
/// `sources` maps instance ids to a suite tag (missing ids get `-`). Instances
/// without performance labels get all-false labels.
pub fn project(
    table: &InstanceTable,
    matrix: &ProjectionMatrix,
    labels: &Labels,
    sources: &BTreeMap<String, String>,
) -> Result<InstanceSpace> {
    matrix.validate()?;
    let cols = matrix.columns_in(table)?;
    let standardized: Vec<Vec<f64>> = cols
        .iter()
        .map(|&k| {
            let c = table.column(k);
            if table.len() > 1 && is_constant(&c) {
                log::warn!("feature {} is constant across instances; standardised to 0", table.names[k]);
            }
            z_scores(&c)
        })
        .collect();
    let points = (0..table.len())
        .map(|i| {
            let v: Vec<f64> = standardized.iter().map(|c| c[i]).collect();
            let id = table.instances[i].clone();
            let good: Vec<bool> = labels
                .algorithms
                .iter()
                .map(|a| labels.score(&id, a).is_some_and(|s| s.good))
                .collect();
            SpacePoint {
                z: matrix.apply(&v),
                source: sources.get(&id).cloned().unwrap_or_else(|| "-".into()),
                good_count: good.iter().filter(|g| **g).count(),
                good,
                id,
            }
        })
        .collect();
    Ok(InstanceSpace {
        algorithms: labels.algorithms.clone(),
        points,
    })
}
