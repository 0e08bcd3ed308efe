//! Global (random-sample) features.

use crate::dominance::{extract_sets, ParetoSets};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::indicators::{coverage, generational_distance, hypervolume, NormalizationFrame, DEFAULT_REFERENCE};
use crate::stats::{self, is_constant, linear_model, moments, pearson, spearman};
use crate::sampling::SampleSet;

/// Normalised quality and violation thresholds for the ideal zone.
pub const IDEAL_ZONE: f64 = 0.25;

/// Shared intermediate results for the three global feature blocks.
#[derive(Debug, Clone)]
pub struct GlobalAnalysis<'a> {
    pub sample: &'a SampleSet,
    pub sets: ParetoSets,
    pub frame: NormalizationFrame,
    /// Objectives normalised with `frame`, one row per solution.
    pub normalized: Vec<Vec<f64>>,
    pub cv: Vec<f64>,
}

impl<'a> GlobalAnalysis<'a> {
    pub fn new(sample: &'a SampleSet) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::Argument("empty sample".into()));
        }
        let sets = extract_sets(sample);
        let frame = NormalizationFrame::from_points(sample.solutions.iter().map(|s| s.f.as_slice()))
            .ok_or_else(|| Error::Argument("empty sample".into()))?;
        let normalized = sample.solutions.iter().map(|s| frame.apply(&s.f)).collect();
        let cv = sample.solutions.iter().map(|s| s.cv).collect();
        Ok(Self {
            sample,
            sets,
            frame,
            normalized,
            cv,
        })
    }

    fn m(&self) -> usize {
        self.sample.meta.m
    }

    fn len(&self) -> usize {
        self.sample.len()
    }

    fn objective(&self, m: usize) -> Vec<f64> {
        self.sample.solutions.iter().map(|s| s.f[m]).collect()
    }

    fn decision_rows(&self) -> Vec<Vec<f64>> {
        self.sample.solutions.iter().map(|s| s.x.clone()).collect()
    }

    fn normalized_subset(&self, idx: &[usize]) -> Vec<Vec<f64>> {
        idx.iter().map(|&i| self.normalized[i].clone()).collect()
    }

    fn hv_of(&self, idx: &[usize]) -> Result<f64> {
        hypervolume(&self.normalized_subset(idx), &vec![DEFAULT_REFERENCE; self.m()])
    }

    /// Unconstrained ranks divided by the front count.
    pub fn normalized_unconstrained_ranks(&self) -> Vec<f64> {
        let fa = &self.sets.unconstrained;
        fa.ranks.iter().map(|&r| r as f64 / fa.front_count as f64).collect()
    }

    /// Multi-objective landscape block.
    pub fn mo_block(&self) -> FeatureVector {
        let mut fv = FeatureVector::new();
        let n = self.len();
        fv.set("upo_n", self.sets.upo.len() as f64 / n as f64);
        put_result(&mut fv, "uhv", self.hv_of(&self.sets.upo));

        let objectives: Vec<Vec<f64>> = (0..self.m()).map(|m| self.objective(m)).collect();
        if n >= 2 {
            let mut total = 0.0;
            let mut pairs = 0usize;
            let mut degenerate = false;
            for a in 0..objectives.len() {
                for b in a + 1..objectives.len() {
                    degenerate |= is_constant(&objectives[a]) || is_constant(&objectives[b]);
                    total += pearson(&objectives[a], &objectives[b]).unwrap_or(0.0);
                    pairs += 1;
                }
            }
            fv.put("corr_obj", total / pairs as f64, degenerate);
        } else {
            fv.flag("corr_obj");
        }

        let ranks = self.normalized_unconstrained_ranks();
        // sample is non-empty, so moments cannot fail
        let rm = moments(&ranks).expect("non-empty ranks");
        let flat = is_constant(&ranks);
        fv.set("mean_f", rm.mean);
        fv.set("std_f", rm.std);
        fv.set("max_f", rm.max);
        fv.put("skew_f", rm.skewness, flat || n < 3);
        fv.put("kurt_f", rm.kurtosis, flat || n < 4);

        let mut skews = Vec::with_capacity(self.m());
        let mut kurts = Vec::with_capacity(self.m());
        let mut skew_flag = false;
        let mut kurt_flag = false;
        for obj in &objectives {
            let om = moments(obj).expect("non-empty objective");
            skew_flag |= is_constant(obj) || n < 3;
            kurt_flag |= is_constant(obj) || n < 4;
            skews.push(om.skewness);
            kurts.push(om.kurtosis);
        }
        put_aggregates(&mut fv, "kurt", &kurts, kurt_flag);
        put_aggregates(&mut fv, "skew", &skews, skew_flag);

        match linear_model(&self.decision_rows(), &ranks) {
            Ok(d) => {
                fv.put("f_mdl_r2", d.r2adj, d.constant_response);
                fv.put("f_range_coeff", d.coeff_range, d.constant_response || d.rank_deficient);
            }
            Err(e) => {
                log::debug!("rank linear model unavailable: {e}");
                fv.flag("f_mdl_r2");
                fv.flag("f_range_coeff");
            }
        }
        fv
    }

    /// Violation landscape block.
    pub fn cv_block(&self) -> FeatureVector {
        let mut fv = FeatureVector::new();
        let n = self.len();
        let cm = moments(&self.cv).expect("non-empty cv");
        let flat = is_constant(&self.cv);
        fv.set("min_cv", cm.min);
        fv.put("skew_cv", cm.skewness, flat || n < 3);
        fv.put("kurt_cv", cm.kurtosis, flat || n < 4);

        match linear_model(&self.decision_rows(), &self.cv) {
            Ok(d) => {
                fv.put("cv_mdl_r2", d.r2adj, d.constant_response);
                fv.put("cv_range_coeff", d.coeff_range, d.constant_response || d.rank_deficient);
            }
            Err(e) => {
                log::debug!("violation linear model unavailable: {e}");
                fv.flag("cv_mdl_r2");
                fv.flag("cv_range_coeff");
            }
        }

        let dist = self.distance_to_feasible();
        if n >= 2 && !flat && !is_constant(&dist) {
            put_result(&mut fv, "dist_c_corr", pearson(&self.cv, &dist));
        } else {
            fv.flag("dist_c_corr");
        }
        fv
    }

    /// Euclidean decision-space distance from every solution to the nearest
    /// feasible one, or to the first minimum-violation solution when none is
    /// feasible.
    pub fn distance_to_feasible(&self) -> Vec<f64> {
        let sols = &self.sample.solutions;
        let mut targets: Vec<usize> = (0..sols.len()).filter(|&i| sols[i].is_feasible()).collect();
        if targets.is_empty() {
            let best = (0..sols.len())
                .min_by(|&a, &b| sols[a].cv.total_cmp(&sols[b].cv))
                .expect("non-empty sample");
            targets.push(best);
        }
        crate::par::map(sols, |s| {
            if s.is_feasible() {
                return 0.0;
            }
            targets
                .iter()
                .map(|&t| squared(&s.x, &sols[t].x))
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
    }

    /// Multi-objective-violation landscape block.
    pub fn mov_block(&self) -> FeatureVector {
        let mut fv = FeatureVector::new();
        let n = self.len();
        let sols = &self.sample.solutions;
        let (upo, cpo) = (&self.sets.upo, &self.sets.cpo);

        let feasible = sols.iter().filter(|s| s.is_feasible()).count();
        fv.set("fsr", feasible as f64 / n as f64);
        fv.set("po_n", cpo.len() as f64 / n as f64);
        let hv = self.hv_of(cpo);
        let uhv = self.hv_of(upo);
        match (&hv, &uhv) {
            (Ok(h), Ok(u)) => {
                fv.set("hv", *h);
                fv.put("hv_uhv_n", if *u > 0.0 { h / u } else { 0.0 }, *u <= 0.0);
            }
            _ => {
                put_result(&mut fv, "hv", hv);
                fv.flag("hv_uhv_n");
            }
        }
        // first fronts are never empty for a non-empty sample
        fv.set("cpo_upo_n", cpo.len() as f64 / upo.len() as f64);

        let cpo_f = self.normalized_subset(cpo);
        let upo_f = self.normalized_subset(upo);
        put_result(&mut fv, "GD_cpo_upo", generational_distance(&cpo_f, &upo_f));
        put_result(&mut fv, "cover_cpo_upo", coverage(&cpo_f, &upo_f));

        let cv_flat = is_constant(&self.cv) || n < 2;
        let cobj: Vec<f64> = (0..self.m())
            .map(|m| pearson(&self.objective(m), &self.cv).unwrap_or(0.0))
            .collect();
        fv.put("corr_cobj_min", min_of(&cobj), cv_flat);
        fv.put("corr_cobj_max", max_of(&cobj), cv_flat);

        let crank: Vec<f64> = self.sets.constrained.ranks.iter().map(|&r| r as f64).collect();
        if n >= 2 && !cv_flat && !is_constant(&crank) {
            put_result(&mut fv, "corr_cf", spearman(&self.cv, &crank));
        } else {
            fv.flag("corr_cf");
        }

        let cv_norm = min_max(&self.cv);
        let in_zone = |quality: &[f64]| {
            quality
                .iter()
                .zip(&cv_norm)
                .filter(|(q, c)| **q <= IDEAL_ZONE && **c <= IDEAL_ZONE)
                .count() as f64
                / n as f64
        };
        let piz_ob: Vec<f64> = (0..self.m()).map(|m| in_zone(&min_max(&self.objective(m)))).collect();
        fv.set("piz_ob_min", min_of(&piz_ob));
        fv.set("piz_ob_max", max_of(&piz_ob));
        fv.set("piz_f", in_zone(&min_max(&crank)));

        let ps: Vec<&[f64]> = cpo.iter().map(|&i| sols[i].x.as_slice()).collect();
        put_spread(&mut fv, "ps", &ps);
        let pf: Vec<&[f64]> = cpo_f.iter().map(Vec::as_slice).collect();
        put_spread(&mut fv, "pf", &pf);
        fv
    }
}

fn squared(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Min-max scaling to [0, 1]; a constant series maps to zeros.
fn min_max(v: &[f64]) -> Vec<f64> {
    let (lo, hi) = (min_of(v), max_of(v));
    let span = hi - lo;
    if span > 0.0 {
        v.iter().map(|x| (x - lo) / span).collect()
    } else {
        vec![0.0; v.len()]
    }
}

fn put_result(fv: &mut FeatureVector, name: &str, r: Result<f64>) {
    match r {
        Ok(v) => fv.set(name, v),
        Err(e) => {
            log::debug!("{name}: {e}");
            fv.flag(name);
        }
    }
}

fn put_aggregates(fv: &mut FeatureVector, prefix: &str, values: &[f64], degenerate: bool) {
    let avg = stats::mean(values);
    let (lo, hi) = (min_of(values), max_of(values));
    fv.put(&format!("{prefix}_avg"), avg, degenerate);
    fv.put(&format!("{prefix}_min"), lo, degenerate);
    fv.put(&format!("{prefix}_max"), hi, degenerate);
    fv.put(&format!("{prefix}_rnge"), hi - lo, degenerate);
}

/// Pairwise-distance summary of one point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub max: f64,
    pub mean: f64,
    /// Mean over points of the IQR of each point's distances to the others.
    pub iqr_mean: f64,
}

/// `None` for fewer than two points.
pub fn pairwise_spread(points: &[&[f64]]) -> Option<Spread> {
    let k = points.len();
    if k < 2 {
        return None;
    }
    let per_point: Vec<(f64, f64, f64)> = crate::par::map_range(k, |i| {
        let mut d: Vec<f64> = (0..k)
            .filter(|&j| j != i)
            .map(|j| squared(points[i], points[j]).sqrt())
            .collect();
        let max = max_of(&d);
        let sum: f64 = d.iter().sum();
        let iqr = select_quantile(&mut d, 0.75) - select_quantile(&mut d, 0.25);
        (max, sum, iqr)
    });
    let max = per_point.iter().map(|p| p.0).fold(0.0, f64::max);
    let sum: f64 = per_point.iter().map(|p| p.1).sum();
    let iqr_sum: f64 = per_point.iter().map(|p| p.2).sum();
    Some(Spread {
        max,
        mean: sum / (k * (k - 1)) as f64,
        iqr_mean: iqr_sum / k as f64,
    })
}

/// Linear-interpolation quantile by selection; reorders `v`.
fn select_quantile(v: &mut [f64], p: f64) -> f64 {
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let (_, &mut a, upper) = v.select_nth_unstable_by(lo, f64::total_cmp);
    let frac = h - lo as f64;
    if frac == 0.0 || upper.is_empty() {
        return a;
    }
    let b = upper.iter().copied().fold(f64::INFINITY, f64::min);
    a + frac * (b - a)
}

fn put_spread(fv: &mut FeatureVector, prefix: &str, points: &[&[f64]]) {
    let names = [
        format!("{prefix}_dist_max"),
        format!("{prefix}_dist_mean"),
        format!("{prefix}_dist_iqr_mean"),
    ];
    match pairwise_spread(points) {
        Some(s) => {
            fv.set(&names[0], s.max);
            fv.set(&names[1], s.mean);
            fv.set(&names[2], s.iqr_mean);
        }
        None => names.iter().for_each(|n| fv.flag(n)),
    }
}

pub fn mo_global(sample: &SampleSet) -> Result<FeatureVector> {
    Ok(GlobalAnalysis::new(sample)?.mo_block())
}

pub fn cv_global(sample: &SampleSet) -> Result<FeatureVector> {
    Ok(GlobalAnalysis::new(sample)?.cv_block())
}

pub fn mov_global(sample: &SampleSet) -> Result<FeatureVector> {
    Ok(GlobalAnalysis::new(sample)?.mov_block())
}

/// All three global blocks, sharing one sort of the sample.
pub fn global_features(sample: &SampleSet) -> Result<FeatureVector> {
    let a = GlobalAnalysis::new(sample)?;
    let mut fv = a.mo_block();
    fv.extend(a.cv_block());
    fv.extend(a.mov_block());
    Ok(fv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{free1, lin1};
    use crate::sampling::uniform_sample;

    #[test]
    fn select_quantile_matches_sorted() {
        let data = [5.0, 1.0, 4.0, 2.0, 3.0, 9.0, 0.5];
        let mut sorted = data.to_vec();
        sorted.sort_by(f64::total_cmp);
        for p in [0.0, 0.25, 0.5, 0.75, 1.0, 0.33] {
            let mut v = data.to_vec();
            assert_eq!(select_quantile(&mut v, p), stats::quantile_sorted(&sorted, p));
        }
    }

    #[test]
    fn spread_of_square() {
        let pts: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let s = pairwise_spread(&refs).unwrap();
        assert!((s.max - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.mean - (4.0 + 2.0 * 2f64.sqrt()) / 6.0).abs() < 1e-15);
        // each point sees [1, 1, sqrt2]: Q1 = 1, Q3 = 1 + 0.5 (sqrt2 - 1)
        assert!((s.iqr_mean - 0.5 * (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!(pairwise_spread(&refs[..1]).is_none());
    }

    #[test]
    fn lin1_global_identities() {
        let s = uniform_sample(&lin1(2).unwrap(), 2000, 3).unwrap();
        let fv = global_features(&s).unwrap();
        assert!((fv.get("corr_obj").unwrap() + 1.0).abs() < 1e-9);
        assert_eq!(fv.get("upo_n"), Some(1.0));
        assert_eq!(fv.get("GD_cpo_upo"), Some(0.0));
        assert_eq!(fv.get("min_cv"), Some(0.0));
        let r2 = fv.get("cv_mdl_r2").unwrap();
        assert!(r2 > 0.0 && r2 <= 1.0 && !fv.is_flagged("cv_mdl_r2"), "{r2}");
        let mean_f = fv.get("mean_f").unwrap();
        assert!((0.0..=1.0).contains(&mean_f));
    }

    #[test]
    fn free1_mov_identities() {
        let s = uniform_sample(&free1(3).unwrap(), 600, 4).unwrap();
        let fv = global_features(&s).unwrap();
        assert_eq!(fv.get("fsr"), Some(1.0));
        assert_eq!(fv.get("po_n"), fv.get("upo_n"));
        assert_eq!(fv.get("hv"), fv.get("uhv"));
        assert_eq!(fv.get("cpo_upo_n"), Some(1.0));
        assert_eq!(fv.get("hv_uhv_n"), Some(1.0));
        assert_eq!(fv.get("cover_cpo_upo"), Some(1.0));
        assert_eq!(fv.get("GD_cpo_upo"), Some(0.0));
        assert_eq!(fv.get("corr_cf"), Some(0.0));
        assert!(fv.is_flagged("corr_cf"));
        for name in ["min_cv", "skew_cv", "kurt_cv"] {
            assert_eq!(fv.get(name), Some(0.0), "{name}");
        }
        assert!(fv.is_flagged("skew_cv") && fv.is_flagged("kurt_cv") && fv.is_flagged("dist_c_corr"));
    }

    #[test]
    fn single_point_front_flags_spread() {
        // a single point dominates everything else: upo = cpo = {0}
        let p = crate::problem::Problem::new(
            crate::problem::ProblemMeta {
                name: "bowl".into(),
                n: 1,
                m: 2,
                j: 0,
                k: 0,
                lower: vec![0.0],
                upper: vec![1.0],
            },
            |x: &[f64]| crate::problem::Evaluation {
                f: vec![x[0], x[0]],
                g: vec![],
                h: vec![],
            },
        )
        .unwrap();
        let s = uniform_sample(&p, 50, 1).unwrap();
        let fv = mov_global(&s).unwrap();
        assert!(fv.is_flagged("ps_dist_max") && fv.is_flagged("pf_dist_iqr_mean"));
        assert_eq!(fv.get("ps_dist_mean"), Some(0.0));
    }
}
