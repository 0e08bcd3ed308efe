use std::collections::BTreeMap;

use proptest::prelude::*;

use cmop_landscape::dominance::{constrained_compare, nondominated_sort, pareto_compare, Dominance, SortMode};
use cmop_landscape::indicators::hypervolume;
use cmop_landscape::pipeline::performance::binarize;
use cmop_landscape::pipeline::ProjectionMatrix;
use cmop_landscape::problem::{builtin, compute_violation, EvaluatedSolution};
use cmop_landscape::sampling::{random_walk, uniform_sample};
use cmop_landscape::stats::{lag1_autocorr, pearson, spearman, yeo_johnson};

fn sol(f: Vec<f64>, cv: f64) -> EvaluatedSolution {
    EvaluatedSolution {
        x: vec![0.0],
        f,
        g: vec![cv],
        h: vec![],
        cv,
    }
}

fn grid_point(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0u8..5).prop_map(|v| f64::from(v) / 4.0), m)
}

fn front(m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0f64..1.2, m), 1..25)
}

proptest! {
    #[test]
    fn ranks_respect_dominance(
        pts in prop::collection::vec((grid_point(2), prop::sample::select(vec![0.0, 0.0, 0.5, 1.0])), 1..60),
        constrained in any::<bool>(),
    ) {
        let sols: Vec<EvaluatedSolution> = pts.into_iter().map(|(f, cv)| sol(f, cv)).collect();
        let mode = if constrained { SortMode::Constrained } else { SortMode::Unconstrained };
        let fa = nondominated_sort(&sols, mode);
        for i in 0..sols.len() {
            // a dominated point is ranked strictly behind its dominator
            for j in 0..sols.len() {
                let d = if constrained {
                    constrained_compare(&sols[j], &sols[i])
                } else {
                    pareto_compare(&sols[j].f, &sols[i].f).unwrap()
                };
                if d == Dominance::FirstDominates {
                    prop_assert!(fa.ranks[j] < fa.ranks[i]);
                }
            }
            // anything past the first front has a dominator one front ahead
            if fa.ranks[i] > 1 {
                let has_parent = (0..sols.len()).any(|j| {
                    fa.ranks[j] == fa.ranks[i] - 1
                        && if constrained {
                            constrained_compare(&sols[j], &sols[i]) == Dominance::FirstDominates
                        } else {
                            pareto_compare(&sols[j].f, &sols[i].f).unwrap() == Dominance::FirstDominates
                        }
                });
                prop_assert!(has_parent);
            }
        }
    }

    #[test]
    fn pareto_compare_is_antisymmetric(a in grid_point(3), b in grid_point(3)) {
        let ab = pareto_compare(&a, &b).unwrap();
        prop_assert_eq!(ab.flip(), pareto_compare(&b, &a).unwrap());
        if a == b {
            prop_assert_eq!(ab, Dominance::Incomparable);
        }
    }

    #[test]
    fn hypervolume_bounds_and_monotonicity(pts in front(3), extra in prop::collection::vec(0.0f64..1.2, 3)) {
        let r = [1.1; 3];
        let hv = hypervolume(&pts, &r).unwrap();
        prop_assert!(hv >= 0.0 && hv <= 1.1f64.powi(3) + 1e-12);
        let mut more = pts.clone();
        more.push(extra);
        prop_assert!(hypervolume(&more, &r).unwrap() >= hv - 1e-12);
        let mut rev = pts.clone();
        rev.reverse();
        prop_assert!((hypervolume(&rev, &r).unwrap() - hv).abs() < 1e-12);
    }

    #[test]
    fn hypervolume_2d_single_point_is_a_box(p in prop::collection::vec(0.0f64..1.1, 2)) {
        let hv = hypervolume(&[p.clone()], &[1.1, 1.1]).unwrap();
        prop_assert!((hv - (1.1 - p[0]) * (1.1 - p[1])).abs() < 1e-12);
    }

    #[test]
    fn correlations_are_bounded(xy in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2..50)) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        let r = pearson(&x, &y).unwrap();
        let s = spearman(&x, &y).unwrap();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&s));
        if x.len() >= 3 {
            let a = lag1_autocorr(&x).unwrap();
            prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&a));
        }
    }

    #[test]
    fn violation_is_monotone(g in prop::collection::vec(-2.0f64..2.0, 1..5), bump in 0.0f64..1.0, k in 0usize..5) {
        let base = compute_violation(&g, &[], 1e-4).unwrap();
        prop_assert!(base >= 0.0);
        let mut worse = g.clone();
        let i = k % worse.len();
        worse[i] += bump;
        prop_assert!(compute_violation(&worse, &[], 1e-4).unwrap() >= base);
    }

    #[test]
    fn yeo_johnson_is_increasing(x in -50.0f64..50.0, d in 1e-6f64..5.0, lambda in -5.0f64..5.0) {
        prop_assert!(yeo_johnson(x + d, lambda) > yeo_johnson(x, lambda));
    }

    #[test]
    fn binarize_best_is_good_unless_zero(means in prop::collection::vec(0.0f64..1.0, 1..6)) {
        let map: BTreeMap<String, f64> = means.iter().enumerate().map(|(i, m)| (format!("a{i}"), *m)).collect();
        let labels = binarize(&map);
        let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (alg, s) in &labels {
            prop_assert!((0.0..=1.0).contains(&s.normalized_hv));
            if s.good {
                prop_assert!(s.mean_hv >= 0.99 * hi && s.mean_hv > 0.0, "{} labelled good", alg);
            }
            if s.mean_hv == hi && hi > 0.0 {
                prop_assert!(s.good);
            }
        }
    }

    #[test]
    fn projection_is_linear(
        a in prop::collection::vec(-3.0f64..3.0, 23),
        b in prop::collection::vec(-3.0f64..3.0, 23),
        c in -2.0f64..2.0,
    ) {
        let w = ProjectionMatrix::builtin();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| c * x + y).collect();
        let (za, zb, zs) = (w.apply(&a), w.apply(&b), w.apply(&sum));
        for k in 0..2 {
            prop_assert!((zs[k] - (c * za[k] + zb[k])).abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>()) {
        let p = builtin("BNH", 2).unwrap();
        let a = uniform_sample(&p, 50, seed).unwrap();
        let b = uniform_sample(&p, 50, seed).unwrap();
        prop_assert_eq!(&a.solutions, &b.solutions);
        for s in &a.solutions {
            prop_assert!(p.meta().contains(&s.x));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn walks_are_deterministic_and_in_bounds(seed in any::<u64>()) {
        let p = builtin("LIN-1", 3).unwrap();
        let a = random_walk(&p, seed).unwrap();
        let b = random_walk(&p, seed).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (s, t) in a.steps.iter().zip(&b.steps) {
            prop_assert_eq!(&s.current, &t.current);
            prop_assert_eq!(&s.neighbors, &t.neighbors);
            for q in s.neighborhood() {
                prop_assert!(p.meta().contains(&q.x));
            }
        }
    }
}
