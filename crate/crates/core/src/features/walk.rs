//! Random-walk (`*_rws`) features.

use crate::dominance::{constrained_compare, nondominated_sort, Dominance, SortMode};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::indicators::{hypervolume, NormalizationFrame, DEFAULT_REFERENCE};
use crate::problem::EvaluatedSolution;
use crate::sampling::WalkTrace;
use crate::stats::{is_constant, lag1_autocorr, mean};

const MIN_STEPS: usize = 3;

/// Per-step raw series of one walk, one entry per step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepSeries {
    pub dist_x: Vec<f64>,
    pub dist_f: Vec<f64>,
    pub dist_c: Vec<f64>,
    pub dist_f_c: Vec<f64>,
    pub ncv: Vec<f64>,
    pub nncv: Vec<f64>,
    pub bncv: Vec<f64>,
    pub sup: Vec<f64>,
    pub inf: Vec<f64>,
    pub inc: Vec<f64>,
    pub lnd: Vec<f64>,
    pub nfronts: Vec<f64>,
    pub nuhv: Vec<f64>,
    pub nhv: Vec<f64>,
    pub bhv: Vec<f64>,
    pub feasible: Vec<bool>,
}

#[derive(Debug, Clone, Copy, Default)]
struct StepValues {
    dist_x: f64,
    dist_f: f64,
    dist_c: f64,
    dist_f_c: f64,
    ncv: f64,
    nncv: f64,
    bncv: f64,
    sup: f64,
    inf: f64,
    inc: f64,
    lnd: f64,
    nfronts: f64,
    nuhv: f64,
    nhv: f64,
    bhv: f64,
    feasible: bool,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn scale(v: f64, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        (v - lo) / (hi - lo)
    } else {
        0.0
    }
}

struct WalkFrame {
    objectives: NormalizationFrame,
    cv_min: f64,
    cv_max: f64,
    reference: Vec<f64>,
}

impl WalkFrame {
    fn new(walk: &WalkTrace) -> Self {
        let all = || walk.steps.iter().flat_map(|s| s.neighborhood());
        let objectives = NormalizationFrame::from_points(all().map(|s| s.f.as_slice()))
            .expect("walk has at least one point");
        let cv_min = all().map(|s| s.cv).fold(f64::INFINITY, f64::min);
        let cv_max = all().map(|s| s.cv).fold(f64::NEG_INFINITY, f64::max);
        let reference = vec![DEFAULT_REFERENCE; objectives.dim()];
        Self {
            objectives,
            cv_min,
            cv_max,
            reference,
        }
    }

    fn joined(&self, s: &EvaluatedSolution) -> Vec<f64> {
        let mut v = self.objectives.apply(&s.f);
        v.push(scale(s.cv, self.cv_min, self.cv_max));
        v
    }

    fn hv(&self, members: &[&EvaluatedSolution]) -> Result<f64> {
        let pts: Vec<Vec<f64>> = members.iter().map(|s| self.objectives.apply(&s.f)).collect();
        hypervolume(&pts, &self.reference)
    }
}

fn step_values(
    frame: &WalkFrame,
    current: &EvaluatedSolution,
    neighbors: &[EvaluatedSolution],
) -> Result<StepValues> {
    let b = neighbors.len();
    if b == 0 {
        return Err(Error::Shape("walk step without neighbours".into()));
    }
    let bf = b as f64;
    let fc = frame.objectives.apply(&current.f);
    let jc = frame.joined(current);
    let mut v = StepValues {
        ncv: current.cv,
        feasible: current.is_feasible(),
        ..StepValues::default()
    };
    for nb in neighbors {
        v.dist_x += distance(&nb.x, &current.x);
        v.dist_f += distance(&frame.objectives.apply(&nb.f), &fc);
        v.dist_c += (nb.cv - current.cv).abs();
        v.dist_f_c += distance(&frame.joined(nb), &jc);
        match constrained_compare(nb, current) {
            Dominance::FirstDominates => v.sup += 1.0,
            Dominance::SecondDominates => v.inf += 1.0,
            Dominance::Incomparable => v.inc += 1.0,
        }
    }
    v.dist_x /= bf;
    v.dist_f /= bf;
    v.dist_c /= bf;
    v.dist_f_c /= bf;
    v.sup /= bf;
    v.inf /= bf;
    v.inc /= bf;

    let hood: Vec<&EvaluatedSolution> = std::iter::once(current).chain(neighbors).collect();
    let total = hood.len() as f64;
    v.nncv = hood.iter().map(|s| s.cv).sum::<f64>() / total;

    let constrained = nondominated_sort(&hood, SortMode::Constrained);
    let best: Vec<&EvaluatedSolution> = constrained.first_front().into_iter().map(|i| hood[i]).collect();
    v.bncv = best.iter().map(|s| s.cv).sum::<f64>() / best.len() as f64;
    v.lnd = best.len() as f64 / total;
    v.nfronts = constrained.front_count as f64;
    v.bhv = frame.hv(&best)?;

    let unconstrained = nondominated_sort(&hood, SortMode::Unconstrained);
    let ubest: Vec<&EvaluatedSolution> = unconstrained.first_front().into_iter().map(|i| hood[i]).collect();
    v.nuhv = frame.hv(&ubest)?;

    let feasible: Vec<&EvaluatedSolution> = hood.iter().copied().filter(|s| s.is_feasible()).collect();
    v.nhv = if feasible.is_empty() { 0.0 } else { frame.hv(&feasible)? };
    Ok(v)
}

/// Raw per-step series of a walk.
///
/// Objective and violation scaling uses the min/max over every point of the walk.
pub fn step_series(walk: &WalkTrace) -> Result<StepSeries> {
    if walk.len() < MIN_STEPS {
        return Err(Error::Argument(format!(
            "walk needs at least {MIN_STEPS} steps, got {}",
            walk.len()
        )));
    }
    let frame = WalkFrame::new(walk);
    let values = crate::par::map(&walk.steps, |s| step_values(&frame, &s.current, &s.neighbors))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let col = |f: fn(&StepValues) -> f64| values.iter().map(f).collect::<Vec<f64>>();
    Ok(StepSeries {
        dist_x: col(|v| v.dist_x),
        dist_f: col(|v| v.dist_f),
        dist_c: col(|v| v.dist_c),
        dist_f_c: col(|v| v.dist_f_c),
        ncv: col(|v| v.ncv),
        nncv: col(|v| v.nncv),
        bncv: col(|v| v.bncv),
        sup: col(|v| v.sup),
        inf: col(|v| v.inf),
        inc: col(|v| v.inc),
        lnd: col(|v| v.lnd),
        nfronts: col(|v| v.nfronts),
        nuhv: col(|v| v.nuhv),
        nhv: col(|v| v.nhv),
        bhv: col(|v| v.bhv),
        feasible: values.iter().map(|v| v.feasible).collect(),
    })
}

/// Fraction of consecutive steps whose current solutions differ in feasibility.
pub fn boundary_crossing_ratio(feasible: &[bool]) -> f64 {
    if feasible.len() < 2 {
        return 0.0;
    }
    let crossings = feasible.windows(2).filter(|w| w[0] != w[1]).count();
    crossings as f64 / (feasible.len() - 1) as f64
}

fn put_avg_r1(fv: &mut FeatureVector, avg: &str, r1: &str, series: &[f64]) {
    fv.set(avg, mean(series));
    put_r1(fv, r1, series);
}

fn put_r1(fv: &mut FeatureVector, name: &str, series: &[f64]) {
    match lag1_autocorr(series) {
        Ok(r) => fv.put(name, r, is_constant(series)),
        Err(_) => fv.flag(name),
    }
}

/// Elementwise `num / dist_x`, dropping steps with `dist_x == 0`.
fn ratio_series(num: &[f64], dist_x: &[f64]) -> (Vec<f64>, bool) {
    let out: Vec<f64> = num
        .iter()
        .zip(dist_x)
        .filter(|(_, d)| **d > 0.0)
        .map(|(n, d)| n / d)
        .collect();
    let skipped = out.len() < num.len();
    (out, skipped)
}

fn put_ratio(fv: &mut FeatureVector, avg: &str, r1: &str, num: &[f64], dist_x: &[f64]) {
    let (ratios, skipped) = ratio_series(num, dist_x);
    if ratios.is_empty() {
        fv.flag(avg);
        fv.flag(r1);
        return;
    }
    fv.put(avg, mean(&ratios), skipped);
    match lag1_autocorr(&ratios) {
        Ok(r) => fv.put(r1, r, skipped || is_constant(&ratios)),
        Err(_) => fv.flag(r1),
    }
}

/// All 37 walk features of one walk.
pub fn walk_features(walk: &WalkTrace) -> Result<FeatureVector> {
    let s = step_series(walk)?;
    let mut fv = FeatureVector::new();

    put_avg_r1(&mut fv, "dist_f_avg_rws", "dist_f_r1_rws", &s.dist_f);
    put_ratio(&mut fv, "dist_f_dist_x_avg_rws", "dist_f_dist_x_avg_r1", &s.dist_f, &s.dist_x);
    put_avg_r1(&mut fv, "nuhv_avg_rws", "nuhv_r1_rws", &s.nuhv);

    put_avg_r1(&mut fv, "dist_c_avg_rws", "dist_c_r1_rws", &s.dist_c);
    put_ratio(&mut fv, "dist_c_dist_x_avg_rws", "dist_c_dist_x_r1_rws", &s.dist_c, &s.dist_x);
    put_avg_r1(&mut fv, "ncv_avg_rws", "ncv_r1_rws", &s.ncv);
    put_avg_r1(&mut fv, "nncv_avg_rws", "nncv_r1_rws", &s.nncv);
    put_avg_r1(&mut fv, "bncv_avg_rws", "bncv_r1_rws", &s.bncv);

    put_avg_r1(&mut fv, "sup_avg_rws", "sup_r1_rws", &s.sup);
    put_avg_r1(&mut fv, "inf_avg_rws", "inf_r1_rws", &s.inf);
    put_avg_r1(&mut fv, "inc_avg_rws", "inc_r1_rws", &s.inc);
    put_avg_r1(&mut fv, "lnd_avg_rws", "lnd_r1_rws", &s.lnd);
    put_avg_r1(&mut fv, "dist_x_avg_rws", "dist_x_r1_rws", &s.dist_x);
    put_avg_r1(&mut fv, "dist_f_c_avg_rws", "dist_f_c_r1_rws", &s.dist_f_c);
    put_ratio(&mut fv, "dist_f_c_dist_x_avg_rws", "dist_f_c_dist_x_avg_r1", &s.dist_f_c, &s.dist_x);
    put_avg_r1(&mut fv, "nhv_avg_rws", "nhv_r1_rws", &s.nhv);
    put_avg_r1(&mut fv, "bhv_avg_rws", "bhv_r1_rws", &s.bhv);
    put_avg_r1(&mut fv, "nfronts_avg_rws", "nfronts_r1_rws", &s.nfronts);
    fv.set("rfbx_rws_avg", boundary_crossing_ratio(&s.feasible));
    Ok(fv)
}
