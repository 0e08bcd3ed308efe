//! Pareto and constraint-domination relations and non-dominated sorting.

use crate::error::{Error, Result};
use crate::problem::EvaluatedSolution;
use crate::sampling::SampleSet;

/// Two violations closer than this are treated as equal.
pub const CV_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    FirstDominates,
    SecondDominates,
    Incomparable,
}

impl Dominance {
    pub fn flip(self) -> Self {
        match self {
            Self::FirstDominates => Self::SecondDominates,
            Self::SecondDominates => Self::FirstDominates,
            Self::Incomparable => Self::Incomparable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortMode {
    Unconstrained,
    Constrained,
}

/// Pareto comparison for minimisation. Equal vectors are incomparable.
pub fn pareto_compare(a: &[f64], b: &[f64]) -> Result<Dominance> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!("objective vectors of length {} and {}", a.len(), b.len())));
    }
    Ok(pareto_unchecked(a, b))
}

#[inline]
fn pareto_unchecked(a: &[f64], b: &[f64]) -> Dominance {
    let mut a_better = false;
    let mut b_better = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            a_better = true;
        } else if y < x {
            b_better = true;
        }
        if a_better && b_better {
            return Dominance::Incomparable;
        }
    }
    match (a_better, b_better) {
        (true, false) => Dominance::FirstDominates,
        (false, true) => Dominance::SecondDominates,
        _ => Dominance::Incomparable,
    }
}

/// Constraint domination: feasibility first, then smaller violation, then
/// Pareto dominance when both are feasible or their violations tie.
pub fn constrained_compare(a: &EvaluatedSolution, b: &EvaluatedSolution) -> Dominance {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => Dominance::FirstDominates,
        (false, true) => Dominance::SecondDominates,
        (false, false) if (a.cv - b.cv).abs() > CV_TIE_TOLERANCE => {
            if a.cv < b.cv {
                Dominance::FirstDominates
            } else {
                Dominance::SecondDominates
            }
        }
        _ => pareto_unchecked(&a.f, &b.f),
    }
}

/// Compares two solutions under `mode`.
pub fn compare(a: &EvaluatedSolution, b: &EvaluatedSolution, mode: SortMode) -> Dominance {
    match mode {
        SortMode::Unconstrained => pareto_unchecked(&a.f, &b.f),
        SortMode::Constrained => constrained_compare(a, b),
    }
}

/// 1-based front index per solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontAssignment {
    pub ranks: Vec<usize>,
    pub front_count: usize,
}

impl FrontAssignment {
    /// Indices with rank 1.
    pub fn first_front(&self) -> Vec<usize> {
        self.ranks
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == 1)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Non-dominated sorting by front peeling.
///
/// Domination counts are computed once; removing a front decrements the
/// counts of everything it dominates. Each ordered pair is compared at most
/// twice, and no dominance lists are stored.
pub fn nondominated_sort<S>(solutions: &[S], mode: SortMode) -> FrontAssignment
where
    S: AsRef<EvaluatedSolution> + Sync,
{
    let n = solutions.len();
    if n == 0 {
        return FrontAssignment {
            ranks: Vec::new(),
            front_count: 0,
        };
    }
    let sol = |i: usize| solutions[i].as_ref();
    let mut count: Vec<usize> = crate::par::map_range(n, |i| {
        (0..n)
            .filter(|&j| j != i && compare(sol(j), sol(i), mode) == Dominance::FirstDominates)
            .count()
    });

    let mut ranks = vec![0usize; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    while !remaining.is_empty() {
        rank += 1;
        let mut front: Vec<usize> = remaining.iter().copied().filter(|&i| count[i] == 0).collect();
        if front.is_empty() {
            // Only reachable if the violation tie tolerance creates a cycle;
            // break it by promoting the least-dominated members.
            let min = remaining.iter().map(|&i| count[i]).min().unwrap_or(0);
            front = remaining.iter().copied().filter(|&i| count[i] == min).collect();
        }
        for &i in &front {
            ranks[i] = rank;
        }
        remaining.retain(|&i| ranks[i] == 0);
        let decrements: Vec<usize> = crate::par::map(&remaining, |&q| {
            front
                .iter()
                .filter(|&&p| compare(sol(p), sol(q), mode) == Dominance::FirstDominates)
                .count()
        });
        for (&q, d) in remaining.iter().zip(decrements) {
            count[q] = count[q].saturating_sub(d);
        }
    }
    FrontAssignment {
        ranks,
        front_count: rank,
    }
}

/// Unconstrained (upo) and constrained (cpo) first-front index sets.
#[derive(Debug, Clone)]
pub struct ParetoSets {
    pub upo: Vec<usize>,
    pub cpo: Vec<usize>,
    pub unconstrained: FrontAssignment,
    pub constrained: FrontAssignment,
}

pub fn extract_sets(sample: &SampleSet) -> ParetoSets {
    let unconstrained = nondominated_sort(&sample.solutions, SortMode::Unconstrained);
    let constrained = if sample.meta.is_constrained() {
        nondominated_sort(&sample.solutions, SortMode::Constrained)
    } else {
        unconstrained.clone()
    };
    ParetoSets {
        upo: unconstrained.first_front(),
        cpo: constrained.first_front(),
        unconstrained,
        constrained,
    }
}

impl AsRef<EvaluatedSolution> for EvaluatedSolution {
    fn as_ref(&self) -> &EvaluatedSolution {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sol(f: &[f64], cv: f64) -> EvaluatedSolution {
        EvaluatedSolution {
            x: vec![0.0],
            f: f.to_vec(),
            g: vec![],
            h: vec![],
            cv,
        }
    }

    #[test]
    fn pareto_examples() {
        use Dominance::*;
        assert_eq!(pareto_compare(&[1.0, 1.0], &[2.0, 2.0]).unwrap(), FirstDominates);
        assert_eq!(pareto_compare(&[2.0, 2.0], &[0.0, 3.0]).unwrap(), Incomparable);
        assert_eq!(pareto_compare(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), Incomparable);
        assert_eq!(pareto_compare(&[1.0, 2.0], &[1.0, 3.0]).unwrap(), FirstDominates);
        assert!(pareto_compare(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn constrained_examples() {
        use Dominance::*;
        assert_eq!(constrained_compare(&sol(&[2.0, 2.0], 0.0), &sol(&[0.0, 0.0], 0.5)), FirstDominates);
        assert_eq!(constrained_compare(&sol(&[0.0, 0.0], 0.2), &sol(&[0.0, 0.0], 0.5)), FirstDominates);
        assert_eq!(constrained_compare(&sol(&[1.0, 2.0], 0.0), &sol(&[2.0, 1.0], 0.0)), Incomparable);
        // violations within tolerance fall through to Pareto
        assert_eq!(
            constrained_compare(&sol(&[0.0, 0.0], 0.3), &sol(&[1.0, 1.0], 0.3 + 1e-13)),
            FirstDominates
        );
    }

    #[test]
    fn sort_examples() {
        let s = vec![sol(&[1.0, 1.0], 0.0), sol(&[2.0, 2.0], 0.0), sol(&[0.0, 3.0], 0.0)];
        let fa = nondominated_sort(&s, SortMode::Unconstrained);
        assert_eq!(fa.ranks, vec![1, 2, 1]);
        assert_eq!(fa.front_count, 2);

        let same = vec![sol(&[1.0, 1.0], 0.0); 4];
        assert_eq!(nondominated_sort(&same, SortMode::Unconstrained).ranks, vec![1; 4]);

        let s = vec![sol(&[5.0, 5.0], 0.0), sol(&[0.0, 0.0], 1.0)];
        assert_eq!(nondominated_sort(&s, SortMode::Constrained).ranks, vec![1, 2]);
        assert_eq!(nondominated_sort(&s, SortMode::Unconstrained).ranks, vec![2, 1]);
    }

    #[test]
    fn all_infeasible_still_has_a_first_front() {
        let s = vec![sol(&[0.0, 0.0], 2.0), sol(&[1.0, 1.0], 1.0), sol(&[3.0, 0.0], 1.0)];
        let fa = nondominated_sort(&s, SortMode::Constrained);
        assert_eq!(fa.ranks, vec![2, 1, 1]);
    }
}
