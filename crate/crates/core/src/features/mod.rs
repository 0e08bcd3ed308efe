//! Landscape feature extraction.
//!
//! Feature names are grouped by landscape (multi-objective, violation,
//! multi-objective-violation) and by sampling scheme (global random sample or
//! random walk). [`FEATURE_NAMES`] is the canonical column order.

use indexmap::IndexMap;

use crate::error::Result;
use crate::problem::Problem;
use crate::sampling::{random_walk_with_stream, uniform_sample};

pub mod global;
pub mod walk;

pub use global::{cv_global, global_features, mo_global, mov_global, GlobalAnalysis};
pub use walk::{step_series, walk_features, StepSeries};

pub const MO_GLOBAL: [&str; 18] = [
    "upo_n",
    "uhv",
    "corr_obj",
    "mean_f",
    "std_f",
    "max_f",
    "skew_f",
    "kurt_f",
    "kurt_avg",
    "kurt_min",
    "kurt_max",
    "kurt_rnge",
    "skew_avg",
    "skew_min",
    "skew_max",
    "skew_rnge",
    "f_mdl_r2",
    "f_range_coeff",
];

pub const MO_WALK: [&str; 6] = [
    "dist_f_avg_rws",
    "dist_f_r1_rws",
    "dist_f_dist_x_avg_rws",
    "dist_f_dist_x_avg_r1",
    "nuhv_avg_rws",
    "nuhv_r1_rws",
];

pub const CV_GLOBAL: [&str; 6] = ["min_cv", "skew_cv", "kurt_cv", "cv_mdl_r2", "cv_range_coeff", "dist_c_corr"];

pub const CV_WALK: [&str; 10] = [
    "dist_c_avg_rws",
    "dist_c_r1_rws",
    "dist_c_dist_x_avg_rws",
    "dist_c_dist_x_r1_rws",
    "ncv_avg_rws",
    "ncv_r1_rws",
    "nncv_avg_rws",
    "nncv_r1_rws",
    "bncv_avg_rws",
    "bncv_r1_rws",
];

pub const MOV_GLOBAL: [&str; 19] = [
    "fsr",
    "po_n",
    "hv",
    "cpo_upo_n",
    "hv_uhv_n",
    "GD_cpo_upo",
    "cover_cpo_upo",
    "corr_cobj_min",
    "corr_cobj_max",
    "corr_cf",
    "piz_ob_min",
    "piz_ob_max",
    "piz_f",
    "ps_dist_max",
    "ps_dist_mean",
    "ps_dist_iqr_mean",
    "pf_dist_max",
    "pf_dist_mean",
    "pf_dist_iqr_mean",
];

pub const MOV_WALK: [&str; 21] = [
    "sup_avg_rws",
    "sup_r1_rws",
    "inf_avg_rws",
    "inf_r1_rws",
    "inc_avg_rws",
    "inc_r1_rws",
    "lnd_avg_rws",
    "lnd_r1_rws",
    "dist_x_avg_rws",
    "dist_x_r1_rws",
    "dist_f_c_avg_rws",
    "dist_f_c_r1_rws",
    "dist_f_c_dist_x_avg_rws",
    "dist_f_c_dist_x_avg_r1",
    "nhv_avg_rws",
    "nhv_r1_rws",
    "bhv_avg_rws",
    "bhv_r1_rws",
    "nfronts_avg_rws",
    "nfronts_r1_rws",
    "rfbx_rws_avg",
];

/// All 80 features in canonical column order.
pub static FEATURE_NAMES: std::sync::LazyLock<Vec<&'static str>> = std::sync::LazyLock::new(|| {
    let mut v = Vec::with_capacity(80);
    v.extend(MO_GLOBAL);
    v.extend(MO_WALK);
    v.extend(CV_GLOBAL);
    v.extend(CV_WALK);
    v.extend(MOV_GLOBAL);
    v.extend(MOV_WALK);
    v
});

/// Names used for two violation-model features in published projection matrices.
pub const ALIASES: [(&str, &str); 2] = [
    ("pop_cv_mdl_r2", "cv_mdl_r2"),
    ("pop_cv_range_coeff", "cv_range_coeff"),
];

/// Maps an alias to its canonical feature name.
pub fn canonical_name(name: &str) -> &str {
    ALIASES
        .iter()
        .find(|(alias, _)| *alias == name)
        .map_or(name, |(_, canon)| canon)
}

/// Names of the walk-derived features.
pub fn walk_feature_names() -> impl Iterator<Item = &'static str> {
    MO_WALK.into_iter().chain(CV_WALK).chain(MOV_WALK)
}

/// A feature value. Degenerate values are 0 and carry the flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub value: f64,
    pub degenerate: bool,
}

/// Named feature values in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector {
    entries: IndexMap<String, Feature>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.put(name, value, false);
    }

    /// Records a degenerate value as 0 with its flag set.
    pub fn flag(&mut self, name: &str) {
        self.put(name, 0.0, true);
    }

    /// Stores `value`, or a flagged 0 when `degenerate` (or when `value` is not finite).
    pub fn put(&mut self, name: &str, value: f64, degenerate: bool) {
        let feature = if degenerate || !value.is_finite() {
            Feature {
                value: 0.0,
                degenerate: true,
            }
        } else {
            Feature {
                value,
                degenerate: false,
            }
        };
        self.entries.insert(name.to_owned(), feature);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.feature(name).map(|f| f.value)
    }

    pub fn feature(&self, name: &str) -> Option<&Feature> {
        self.entries
            .get(name)
            .or_else(|| self.entries.get(canonical_name(name)))
    }

    pub fn is_flagged(&self, name: &str) -> bool {
        self.feature(name).is_some_and(|f| f.degenerate)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Feature)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn flagged(&self) -> impl Iterator<Item = &str> {
        self.iter().filter(|(_, f)| f.degenerate).map(|(k, _)| k)
    }

    pub fn extend(&mut self, other: FeatureVector) {
        self.entries.extend(other.entries);
    }

    /// Reorders entries to [`FEATURE_NAMES`] order, extra names last.
    pub fn canonical_order(mut self) -> Self {
        let mut out = IndexMap::with_capacity(self.entries.len());
        for name in FEATURE_NAMES.iter() {
            if let Some(f) = self.entries.shift_remove(*name) {
                out.insert((*name).to_owned(), f);
            }
        }
        out.extend(self.entries);
        Self { entries: out }
    }
}

/// Walk features for problems without an evaluator: every value flagged.
pub fn missing_walk_features() -> FeatureVector {
    let mut fv = FeatureVector::new();
    for name in walk_feature_names() {
        fv.flag(name);
    }
    fv
}

/// Full 80-feature vector for one sample set: a uniform sample of
/// `sample_size` points and one random walk, both seeded by `seed`.
pub fn extract_all(problem: &Problem, sample_size: usize, seed: u64) -> Result<FeatureVector> {
    let sample = uniform_sample(problem, sample_size, seed)?;
    let walk = random_walk_with_stream(problem, seed, WALK_STREAM)?;
    let mut fv = global_features(&sample)?;
    fv.extend(walk_features(&walk)?);
    Ok(fv.canonical_order())
}

/// RNG stream used for walks so that a walk and a uniform sample sharing a
/// seed draw independent numbers.
pub const WALK_STREAM: u64 = 1;
