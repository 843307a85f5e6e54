//! Probabilistic scoring of normalized queries against detection scenes.

mod engine;
mod naive;
mod scene;

use thiserror::Error;

use crate::geometry::GeometryError;

pub use engine::{
    candidate_sets, score_group, score_query, score_query_with, AtomScore, GroupScore, ScoredImage,
    SearchStrategy, Witness, DEFAULT_FLOOR,
};
pub use naive::{hypothesis_count, naive_score, HypothesisCount, DEFAULT_NAIVE_BUDGET};
pub use scene::{Detection, Scene};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("scene `{0}` has no usable ground-sample-distance metadata for a metric predicate")]
    MissingGsd(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("naive enumeration needs {required} assignments, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("macro `{0}` must be expanded before scoring")]
    NotNormalized(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{clause_groups, normalize, parse_query, ConjunctiveQuery, Variable};
    use crate::geometry::{GsdMetadata, OrientedBox, PredicateContext};
    use crate::vocab::Vocabulary;

    fn q(text: &str) -> ConjunctiveQuery {
        normalize(&parse_query(text).unwrap(), &Vocabulary::dota()).unwrap()
    }

    fn boxed(x: f64, y: f64) -> OrientedBox {
        OrientedBox::axis_aligned(x, y, 10.0, 10.0)
    }

    fn planes() -> Scene {
        let mut s = Scene::new("planes");
        for (c, x) in [(0.90, 50.0), (0.85, 90.0), (0.70, 40.0), (0.70, 80.0)] {
            s.push("plane", c, boxed(x, 100.0));
        }
        s
    }

    fn ctx() -> PredicateContext {
        PredicateContext::default()
    }

    #[test]
    fn plane_example() {
        let query = q("plane(A) AND plane(B) AND left_of(A, B)");
        let r = score_query(&query, &planes(), &ctx(), DEFAULT_FLOOR).unwrap();
        assert!((r.probability - 0.765).abs() < 1e-12);
        let w = r.witness.unwrap();
        assert_eq!(w.assignment[&Variable::new("a")], 0);
        assert_eq!(w.assignment[&Variable::new("b")], 1);
        assert!((w.product() - r.probability).abs() < 1e-12);
        assert_eq!(r.hypotheses_evaluated, 12);
        let naive = naive_score(&query, &planes(), &ctx(), DEFAULT_FLOOR, DEFAULT_NAIVE_BUDGET).unwrap();
        assert_eq!(naive, r.probability);
    }

    #[test]
    fn plane_example_pair_products() {
        // Oracle: for each unordered pair, orient it so the left plane binds A.
        let s = planes();
        let d = &s.detections;
        let mut products = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                let (l, r) = if d[i].obb.cx < d[j].obb.cx { (i, j) } else { (j, i) };
                // the pair scores only in the order given by the listing
                let listed_left_first = l == i;
                products.push(if listed_left_first { d[l].confidence * d[r].confidence } else { 0.0 });
            }
        }
        let expected = [0.765, 0.0, 0.63, 0.0, 0.0, 0.49];
        for (p, e) in products.iter().zip(expected) {
            assert!((p - e).abs() < 1e-12, "{p} vs {e}");
        }
    }

    #[test]
    fn single_unary_scores_confidence() {
        let mut s = Scene::new("one");
        s.push("ship", 0.42, boxed(0.0, 0.0));
        let r = score_query(&q("ship(x)"), &s, &ctx(), DEFAULT_FLOOR).unwrap();
        assert_eq!(r.probability, 0.42);
        assert_eq!(r.hypotheses_evaluated, 1);
    }

    #[test]
    fn injective_count_for_pairs() {
        let mut s = Scene::new("harbors");
        for i in 0..4 {
            s.push("harbor", 0.9, boxed(i as f64 * 30.0, 0.0));
        }
        let query = q("harbor(a) AND harbor(b) AND is_close(a, b)");
        let g = &clause_groups(&query)[0];
        let gs = score_group(g, &s, &ctx(), DEFAULT_FLOOR).unwrap();
        assert_eq!(gs.count, 12);
        assert_eq!(hypothesis_count(&query, &s, DEFAULT_FLOOR).factorized, 16);
        let exhaustive = score_query_with(&query, &s, &ctx(), DEFAULT_FLOOR, SearchStrategy::Exhaustive).unwrap();
        assert_eq!(exhaustive.probability, gs.score);
    }

    #[test]
    fn exhaustive_visits_every_injective_assignment() {
        let mut s = Scene::new("harbors");
        for i in 0..5 {
            s.push("harbor", 0.9, boxed(i as f64 * 30.0, 0.0));
        }
        let query = q("harbor(a) AND harbor(b) AND harbor(c) AND is_close(a, b) AND is_close(b, c)");
        let g = &clause_groups(&query)[0];
        let gs = engine::score_group_with(
            g,
            &mut engine::Evaluator::new(&s, &ctx()),
            DEFAULT_FLOOR,
            SearchStrategy::Exhaustive,
        )
        .unwrap();
        assert_eq!(gs.leaves_visited, 60);
        assert_eq!(gs.count, 60);
    }

    #[test]
    fn groups_multiply() {
        let mut s = planes();
        s.push("ship", 0.5, boxed(500.0, 500.0));
        let query = q("plane(a) AND plane(b) AND left_of(a, b) AND ship(c)");
        let r = score_query(&query, &s, &ctx(), DEFAULT_FLOOR).unwrap();
        assert!((r.probability - 0.3825).abs() < 1e-12);
        assert_eq!(r.witness.unwrap().per_atom_scores.len(), 4);
    }

    #[test]
    fn empty_candidates_annihilate() {
        let query = q("plane(a) AND ship(b)");
        let r = score_query(&query, &planes(), &ctx(), DEFAULT_FLOOR).unwrap();
        assert_eq!(r.probability, 0.0);
        assert!(r.witness.is_none());
        assert_eq!(naive_score(&query, &planes(), &ctx(), DEFAULT_FLOOR, DEFAULT_NAIVE_BUDGET).unwrap(), 0.0);
    }

    #[test]
    fn floor_filters_candidates() {
        let query = q("plane(a)");
        let g = &clause_groups(&query)[0];
        assert!(candidate_sets(g, &planes(), 1.0)[&Variable::new("a")].is_empty());
        assert_eq!(candidate_sets(g, &planes(), 0.8)[&Variable::new("a")], vec![0, 1]);
    }

    #[test]
    fn tie_break_is_lexicographic() {
        let mut s = Scene::new("ties");
        for x in [0.0, 100.0, 200.0] {
            s.push("ship", 0.8, boxed(x, 0.0));
        }
        let r = score_query(&q("ship(a) AND ship(b) AND is_different(a, b)"), &s, &ctx(), DEFAULT_FLOOR).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.assignment[&Variable::new("a")], 0);
        assert_eq!(w.assignment[&Variable::new("b")], 1);
    }

    #[test]
    fn isolated_uses_whole_scene() {
        let mut s = Scene::new("iso");
        s.push("roundabout", 1.0, boxed(0.0, 0.0));
        s.push("car", 0.9, boxed(10.0, 0.0));
        let r = score_query(&q("roundabout(r) AND isolated_from(r)"), &s, &ctx(), DEFAULT_FLOOR).unwrap();
        let close = 1.0 / (1.0 + 10.0 / 200f64.sqrt());
        assert!((r.probability - (1.0 - close)).abs() < 1e-12);
        let mut alone = Scene::new("alone");
        alone.push("roundabout", 1.0, boxed(0.0, 0.0));
        let r = score_query(&q("roundabout(r) AND isolated_from(r)"), &alone, &ctx(), DEFAULT_FLOOR).unwrap();
        assert_eq!(r.probability, 1.0);
    }

    #[test]
    fn metric_needs_gsd() {
        let mut s = Scene::new("m");
        s.push("car", 0.9, boxed(0.0, 0.0));
        s.push("car", 0.9, boxed(100.0, 0.0));
        let query = q("car(a) AND car(b) AND is_close_meters(a, b, 5)");
        assert!(matches!(score_query(&query, &s, &ctx(), DEFAULT_FLOOR), Err(InferenceError::MissingGsd(_))));
        let s = s.with_gsd(GsdMetadata::Direct { gsd_w_m_per_px: 0.04, gsd_h_m_per_px: 0.06 });
        let r = score_query(&query, &s, &ctx(), DEFAULT_FLOOR).unwrap();
        assert!((r.probability - 0.81).abs() < 1e-12);
        let tight = q("car(a) AND car(b) AND is_close_meters(a, b, 4.9)");
        assert_eq!(score_query(&tight, &s, &ctx(), DEFAULT_FLOOR).unwrap().probability, 0.0);
    }

    #[test]
    fn macro_rejected_unnormalized() {
        let raw = parse_query("ship(a) AND ship(b) AND aligned(a, b)").unwrap();
        let mut s = Scene::new("s");
        s.push("ship", 0.9, boxed(0.0, 0.0));
        s.push("ship", 0.9, boxed(10.0, 0.0));
        assert!(matches!(score_query(&raw, &s, &ctx(), DEFAULT_FLOOR), Err(InferenceError::NotNormalized(_))));
    }

    #[test]
    fn hypothesis_counts() {
        let mut s = Scene::new("h");
        for _ in 0..3 {
            s.push("ship", 0.9, boxed(0.0, 0.0));
        }
        for _ in 0..7 {
            s.push("car", 0.9, boxed(0.0, 0.0));
        }
        let h = hypothesis_count(&q("ship(a)"), &s, DEFAULT_FLOOR);
        assert_eq!(h, HypothesisCount { factorized: 3, naive: 10 });
    }

    #[test]
    fn naive_budget_guard() {
        let mut s = Scene::new("big");
        for i in 0..101 {
            s.push("ship", 0.9, boxed(i as f64, 0.0));
        }
        let query = q("ship(a) AND ship(b) AND ship(c)");
        assert!(matches!(
            naive_score(&query, &s, &ctx(), DEFAULT_FLOOR, DEFAULT_NAIVE_BUDGET),
            Err(InferenceError::BudgetExceeded { .. })
        ));
    }
}
