//! Uniform sampling and bounded random walks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problem::{EvaluatedSolution, Problem, ProblemMeta};

/// Samples drawn per decision variable for a global sample set.
pub const SAMPLES_PER_VARIABLE: usize = 1000;
/// Walk step bound as a fraction of each coordinate's range.
pub const STEP_FRACTION: f64 = 0.02;
const MIN_WALK_LENGTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMethod {
    Uniform,
    WalkFlattened,
    ExternalFile,
}

/// A set of evaluated solutions of one problem.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub meta: Arc<ProblemMeta>,
    pub solutions: Vec<EvaluatedSolution>,
    pub seed: u64,
    pub method: SampleMethod,
}

impl SampleSet {
    pub fn new(
        meta: Arc<ProblemMeta>,
        solutions: Vec<EvaluatedSolution>,
        seed: u64,
        method: SampleMethod,
    ) -> Result<Self> {
        if solutions.is_empty() {
            return Err(Error::Argument("sample set must not be empty".into()));
        }
        for (i, s) in solutions.iter().enumerate() {
            if s.x.len() != meta.n || s.f.len() != meta.m || s.g.len() != meta.j || s.h.len() != meta.k {
                return Err(Error::Shape(format!("solution {i} does not match problem {}", meta.name)));
            }
        }
        Ok(Self {
            meta,
            solutions,
            seed,
            method,
        })
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Default global sample size, `n * 1000`.
pub fn default_sample_size(n: usize) -> usize {
    n * SAMPLES_PER_VARIABLE
}

fn uniform_point(meta: &ProblemMeta, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..meta.n)
        .map(|i| meta.lower[i] + rng.gen::<f64>() * meta.range(i))
        .collect()
}

/// Draws `count` points i.i.d. uniformly in the box and evaluates them.
pub fn uniform_sample(problem: &Problem, count: usize, seed: u64) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::Argument("sample count must be at least 1".into()));
    }
    let meta = problem.meta();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..count).map(|_| uniform_point(meta, &mut rng)).collect();
    let solutions = crate::par::map(&points, |x| problem.evaluate(x))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    SampleSet::new(Arc::new(meta.clone()), solutions, seed, SampleMethod::Uniform)
}

/// One walk position and its sampled neighbours (the current point excluded).
#[derive(Debug, Clone)]
pub struct WalkStep {
    pub current: EvaluatedSolution,
    pub neighbors: Vec<EvaluatedSolution>,
}

impl WalkStep {
    /// The neighbourhood including the current solution, current first.
    pub fn neighborhood(&self) -> impl Iterator<Item = &EvaluatedSolution> {
        std::iter::once(&self.current).chain(self.neighbors.iter())
    }
}

#[derive(Debug, Clone)]
pub struct WalkTrace {
    pub steps: Vec<WalkStep>,
    /// Neighbourhood size counting the current solution.
    pub neighborhood_size: usize,
    pub step_fraction: f64,
}

impl WalkTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Every evaluated point of the walk (currents and neighbours) as one set.
    pub fn flatten(&self, meta: Arc<ProblemMeta>, seed: u64) -> Result<SampleSet> {
        let solutions = self
            .steps
            .iter()
            .flat_map(|s| s.neighborhood().cloned())
            .collect();
        SampleSet::new(meta, solutions, seed, SampleMethod::WalkFlattened)
    }
}

/// Neighbourhood size `2n + 1` and walk length `floor(n * 1000 / N)` (at least 2).
pub fn walk_shape(n: usize) -> (usize, usize) {
    let size = 2 * n + 1;
    let length = (n * SAMPLES_PER_VARIABLE / size).max(MIN_WALK_LENGTH);
    (size, length)
}

fn reflect(v: f64, lo: f64, hi: f64) -> f64 {
    let v = if v > hi { 2.0 * hi - v } else { v };
    let v = if v < lo { 2.0 * lo - v } else { v };
    v.clamp(lo, hi)
}

/// Simple reflecting random walk with per-coordinate steps in `±2%` of range.
///
/// The walk starts at a uniform point; each step draws `N - 1` neighbours in
/// the step-sized box around the current point (clipped to bounds) and then
/// moves, reflecting at the bounds.
pub fn random_walk(problem: &Problem, seed: u64) -> Result<WalkTrace> {
    random_walk_with_stream(problem, seed, 0)
}

/// [`random_walk`] on a chosen ChaCha stream of `seed`.
pub fn random_walk_with_stream(problem: &Problem, seed: u64, stream: u64) -> Result<WalkTrace> {
    let meta = problem.meta();
    let (size, length) = walk_shape(meta.n);
    let step: Vec<f64> = (0..meta.n).map(|i| STEP_FRACTION * meta.range(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    // Draw every coordinate up front so evaluation can run in parallel.
    let mut plan: Vec<(Vec<f64>, Vec<Vec<f64>>)> = Vec::with_capacity(length);
    let mut current = uniform_point(meta, &mut rng);
    for t in 0..length {
        let neighbors = (0..size - 1)
            .map(|_| {
                (0..meta.n)
                    .map(|i| {
                        let d = rng.gen_range(-step[i]..=step[i]);
                        (current[i] + d).clamp(meta.lower[i], meta.upper[i])
                    })
                    .collect()
            })
            .collect();
        let next = if t + 1 < length {
            Some(
                (0..meta.n)
                    .map(|i| {
                        let d = rng.gen_range(-step[i]..=step[i]);
                        reflect(current[i] + d, meta.lower[i], meta.upper[i])
                    })
                    .collect::<Vec<f64>>(),
            )
        } else {
            None
        };
        plan.push((current.clone(), neighbors));
        if let Some(next) = next {
            current = next;
        }
    }

    let steps = crate::par::map(&plan, |(c, nbrs)| -> Result<WalkStep> {
        Ok(WalkStep {
            current: problem.evaluate(c)?,
            neighbors: nbrs.iter().map(|x| problem.evaluate(x)).collect::<Result<_>>()?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    Ok(WalkTrace {
        steps,
        neighborhood_size: size,
        step_fraction: STEP_FRACTION,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{free1, lin1};

    #[test]
    fn uniform_sample_default_size_and_bounds() {
        let p = lin1(2).unwrap();
        let s = uniform_sample(&p, default_sample_size(2), 7).unwrap();
        assert_eq!(s.len(), 2000);
        assert!(s.solutions.iter().all(|x| p.meta().contains(&x.x)));
    }

    #[test]
    fn uniform_sample_is_seeded() {
        let p = lin1(3).unwrap();
        let a = uniform_sample(&p, 100, 11).unwrap();
        let b = uniform_sample(&p, 100, 11).unwrap();
        let c = uniform_sample(&p, 100, 12).unwrap();
        assert_eq!(a.solutions, b.solutions);
        assert_ne!(a.solutions, c.solutions);
    }

    #[test]
    fn uniform_sample_rejects_zero() {
        assert!(matches!(uniform_sample(&lin1(2).unwrap(), 0, 1), Err(Error::Argument(_))));
    }

    #[test]
    fn lin1_feasible_fraction() {
        let s = uniform_sample(&lin1(2).unwrap(), 10_000, 1).unwrap();
        let frac = s.solutions.iter().filter(|x| x.is_feasible()).count() as f64 / 1e4;
        assert!((frac - 0.8).abs() <= 0.02, "{frac}");
    }

    #[test]
    fn unconstrained_sample_has_zero_violation() {
        let s = uniform_sample(&free1(4).unwrap(), 500, 3).unwrap();
        assert!(s.solutions.iter().all(|x| x.cv == 0.0));
    }

    #[test]
    fn walk_shape_matches_protocol() {
        assert_eq!(walk_shape(5), (11, 454));
        assert_eq!(walk_shape(2), (5, 400));
        assert_eq!(walk_shape(10), (21, 476));
    }

    #[test]
    fn walk_respects_bounds_and_step() {
        let p = crate::problem::bnh().unwrap();
        let w = random_walk(&p, 5).unwrap();
        assert_eq!(w.len(), 400);
        for pair in w.steps.windows(2) {
            for i in 0..2 {
                let d = (pair[1].current.x[i] - pair[0].current.x[i]).abs();
                assert!(d <= STEP_FRACTION * p.meta().range(i) + 1e-12);
            }
        }
        for s in &w.steps {
            assert_eq!(s.neighbors.len(), w.neighborhood_size - 1);
            assert!(s.neighborhood().all(|x| p.meta().contains(&x.x)));
            for nb in &s.neighbors {
                for i in 0..2 {
                    assert!((nb.x[i] - s.current.x[i]).abs() <= STEP_FRACTION * p.meta().range(i) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn walk_is_seeded() {
        let p = lin1(2).unwrap();
        let a = random_walk(&p, 9).unwrap();
        let b = random_walk(&p, 9).unwrap();
        for (x, y) in a.steps.iter().zip(&b.steps) {
            assert_eq!(x.current, y.current);
            assert_eq!(x.neighbors, y.neighbors);
        }
    }

    #[test]
    fn reflection_stays_inside() {
        assert_eq!(reflect(1.01, 0.0, 1.0), 0.99);
        assert_eq!(reflect(-0.01, 0.0, 1.0), 0.01);
        assert_eq!(reflect(0.5, 0.0, 1.0), 0.5);
    }
}
