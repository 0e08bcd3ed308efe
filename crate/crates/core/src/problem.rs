//! Problem definitions, constraint violation and evaluation.
//!
//! Constraints follow the convention `g_j(x) <= 0` is satisfied and
//! `|h_k(x)| <= epsilon` is satisfied.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Equality-constraint relaxation.
pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Dimensions and box bounds of a problem, as stored in problem metadata JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub name: String,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "J", default)]
    pub j: usize,
    #[serde(rename = "K", default)]
    pub k: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ProblemMeta {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Argument(format!("{}: n must be at least 1", self.name)));
        }
        if self.m < 2 {
            return Err(Error::Argument(format!("{}: M must be at least 2", self.name)));
        }
        if self.lower.len() != self.n || self.upper.len() != self.n {
            return Err(Error::Shape(format!(
                "{}: bounds have lengths {}/{} but n = {}",
                self.name,
                self.lower.len(),
                self.upper.len(),
                self.n
            )));
        }
        let bad: Vec<usize> = (0..self.n)
            .filter(|&i| !(self.lower[i] < self.upper[i]) || !self.lower[i].is_finite() || !self.upper[i].is_finite())
            .collect();
        if !bad.is_empty() {
            return Err(Error::Argument(format!(
                "{}: lower < upper violated at indices {bad:?}",
                self.name
            )));
        }
        Ok(())
    }

    pub fn range(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn is_constrained(&self) -> bool {
        self.j + self.k > 0
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n && (0..self.n).all(|i| x[i] >= self.lower[i] && x[i] <= self.upper[i])
    }
}

/// Raw output of an objective/constraint evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

/// A deterministic, re-entrant map `x -> (f, g, h)`.
pub trait Evaluator: Send + Sync {
    fn evaluate(&self, x: &[f64]) -> Evaluation;
}

impl<F> Evaluator for F
where
    F: Fn(&[f64]) -> Evaluation + Send + Sync,
{
    fn evaluate(&self, x: &[f64]) -> Evaluation {
        self(x)
    }
}

/// A constrained multi-objective problem: metadata plus an evaluator.
#[derive(Clone)]
pub struct Problem {
    meta: ProblemMeta,
    evaluator: Arc<dyn Evaluator>,
    epsilon: f64,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("meta", &self.meta)
            .field("epsilon", &self.epsilon)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn new(meta: ProblemMeta, evaluator: impl Evaluator + 'static) -> Result<Self> {
        meta.validate()?;
        Ok(Self {
            meta,
            evaluator: Arc::new(evaluator),
            epsilon: DEFAULT_EPSILON,
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::Argument(format!("epsilon must be >= 0, got {epsilon}")));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn meta(&self) -> &ProblemMeta {
        &self.meta
    }

    pub fn name(&self) -> &str {
        &self.meta.name
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Evaluates `x`, checking bounds and evaluator arity.
    pub fn evaluate(&self, x: &[f64]) -> Result<EvaluatedSolution> {
        let meta = &self.meta;
        if x.len() != meta.n {
            return Err(Error::Shape(format!("expected {} decision variables, got {}", meta.n, x.len())));
        }
        let outside: Vec<usize> = (0..meta.n)
            .filter(|&i| !(x[i] >= meta.lower[i] && x[i] <= meta.upper[i]))
            .collect();
        if !outside.is_empty() {
            return Err(Error::OutOfBounds { indices: outside });
        }
        let Evaluation { f, g, h } = self.evaluator.evaluate(x);
        if f.len() != meta.m || g.len() != meta.j || h.len() != meta.k {
            return Err(Error::Shape(format!(
                "{}: evaluator returned (f, g, h) lengths ({}, {}, {}), expected ({}, {}, {})",
                meta.name,
                f.len(),
                g.len(),
                h.len(),
                meta.m,
                meta.j,
                meta.k
            )));
        }
        if let Some(index) = f.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { kind: "objective", index });
        }
        let cv = compute_violation(&g, &h, self.epsilon)?;
        Ok(EvaluatedSolution {
            x: x.to_vec(),
            f,
            g,
            h,
            cv,
        })
    }
}

/// A decision vector together with its objective and constraint values.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedSolution {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    /// Constraint-violation norm; zero iff feasible.
    pub cv: f64,
}

impl EvaluatedSolution {
    pub fn is_feasible(&self) -> bool {
        self.cv == 0.0
    }
}

/// Constraint-violation norm `sqrt(sum max(0, g)^2 + sum max(0, |h| - eps)^2)`.
pub fn compute_violation(g: &[f64], h: &[f64], epsilon: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (index, &v) in g.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { kind: "inequality constraint", index });
        }
        let t = v.max(0.0);
        acc += t * t;
    }
    for (index, &v) in h.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { kind: "equality constraint", index });
        }
        let t = (v.abs() - epsilon).max(0.0);
        acc += t * t;
    }
    Ok(acc.sqrt())
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["LIN-1", "BNH", "FREE-1"];

/// Looks up a built-in problem. BNH is fixed at two variables; the others
/// scale with `n`.
pub fn builtin(name: &str, n: usize) -> Result<Problem> {
    match name {
        "LIN-1" => lin1(n),
        "FREE-1" => free1(n),
        "BNH" => {
            if n != 2 {
                return Err(Error::Argument(format!("BNH is defined for n = 2 only, got {n}")));
            }
            bnh()
        }
        other => Err(Error::Argument(format!("unknown problem '{other}'"))),
    }
}

/// f = (x1, 1 - x1), g1 = 0.2 - x1 on [0, 1]^n. Feasible iff x1 >= 0.2.
pub fn lin1(n: usize) -> Result<Problem> {
    let meta = ProblemMeta {
        name: "LIN-1".into(),
        n,
        m: 2,
        j: 1,
        k: 0,
        lower: vec![0.0; n],
        upper: vec![1.0; n],
    };
    Problem::new(meta, |x: &[f64]| Evaluation {
        f: vec![x[0], 1.0 - x[0]],
        g: vec![0.2 - x[0]],
        h: vec![],
    })
}

/// LIN-1 without its constraint.
pub fn free1(n: usize) -> Result<Problem> {
    let meta = ProblemMeta {
        name: "FREE-1".into(),
        n,
        m: 2,
        j: 0,
        k: 0,
        lower: vec![0.0; n],
        upper: vec![1.0; n],
    };
    Problem::new(meta, |x: &[f64]| Evaluation {
        f: vec![x[0], 1.0 - x[0]],
        g: vec![],
        h: vec![],
    })
}

/// Binh and Korn's two-constraint problem on [0, 5] x [0, 3].
pub fn bnh() -> Result<Problem> {
    let meta = ProblemMeta {
        name: "BNH".into(),
        n: 2,
        m: 2,
        j: 2,
        k: 0,
        lower: vec![0.0, 0.0],
        upper: vec![5.0, 3.0],
    };
    Problem::new(meta, |x: &[f64]| {
        let (a, b) = (x[0], x[1]);
        Evaluation {
            f: vec![4.0 * a * a + 4.0 * b * b, (a - 5.0).powi(2) + (b - 5.0).powi(2)],
            g: vec![
                (a - 5.0).powi(2) + b * b - 25.0,
                7.7 - (a - 8.0).powi(2) - (b + 3.0).powi(2),
            ],
            h: vec![],
        }
    })
}
