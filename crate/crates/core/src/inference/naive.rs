//! Brute-force scoring over every joint assignment of all query variables.
//! Deliberately shares no search code with the engine so it can serve as an
//! oracle for it.

use std::collections::HashMap;

use serde::Serialize;

use super::scene::Scene;
use super::InferenceError;
use crate::fol::{clause_groups, Atom, ConjunctiveQuery, Variable};
use crate::geometry::{eval_is_close, eval_metric_predicate, eval_relation, MetricPredicate, PredicateContext, Relation};

/// Largest joint-assignment space the naive scorer will enumerate.
pub const DEFAULT_NAIVE_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HypothesisCount {
    /// Sum over clause groups of the product of candidate-list sizes.
    pub factorized: u128,
    /// `N^M`, saturating at `u128::MAX`.
    pub naive: u128,
}

fn saturating_pow(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

/// Hypothesis counts of the factorized and exhaustive strategies. The
/// factorized count multiplies candidate-list sizes without removing
/// assignments that reuse a detection.
pub fn hypothesis_count(q: &ConjunctiveQuery, scene: &Scene, floor: f64) -> HypothesisCount {
    let factorized = clause_groups(q)
        .iter()
        .map(|g| {
            super::candidate_sets(g, scene, floor)
                .values()
                .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128))
        })
        .fold(0u128, |acc, x| acc.saturating_add(x));
    let naive = saturating_pow(scene.detections.len() as u128, q.variables().len());
    HypothesisCount { factorized, naive }
}

/// Maximum over all joint assignments of the product of every atom's value.
/// Variables of one clause group bind distinct detections; different groups
/// may share detections.
pub fn naive_score(
    q: &ConjunctiveQuery,
    scene: &Scene,
    ctx: &PredicateContext,
    floor: f64,
    budget: u128,
) -> Result<f64, InferenceError> {
    let vars: Vec<Variable> = q.variables().to_vec();
    let n = scene.detections.len();
    let space = saturating_pow(n as u128, vars.len());
    if space > budget {
        return Err(InferenceError::BudgetExceeded { required: space, budget });
    }
    let ctx = ctx.with_gsd(scene.gsd.or(ctx.gsd));
    if q.atoms().iter().any(|a| matches!(a, Atom::Metric { .. })) && ctx.resolved_gsd().is_err() {
        return Err(InferenceError::MissingGsd(scene.image_id.clone()));
    }
    let slot: HashMap<&Variable, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut group_of = vec![0usize; vars.len()];
    for (gi, g) in clause_groups(q).iter().enumerate() {
        for v in &g.variables {
            group_of[slot[v]] = gi;
        }
    }
    if n == 0 {
        return Ok(0.0);
    }

    let mut best = 0.0f64;
    let mut pick = vec![0usize; vars.len()];
    'outer: loop {
        let injective = (0..pick.len())
            .all(|i| (0..i).all(|j| group_of[i] != group_of[j] || pick[i] != pick[j]));
        if injective {
            let mut value = 1.0;
            for atom in q.atoms() {
                value *= atom_value(atom, &pick, &slot, scene, &ctx, floor)?;
            }
            if value > best {
                best = value;
            }
        }
        for i in (0..pick.len()).rev() {
            pick[i] += 1;
            if pick[i] < n {
                continue 'outer;
            }
            pick[i] = 0;
        }
        break;
    }
    Ok(best)
}

fn atom_value(
    atom: &Atom,
    pick: &[usize],
    slot: &HashMap<&Variable, usize>,
    scene: &Scene,
    ctx: &PredicateContext,
    floor: f64,
) -> Result<f64, InferenceError> {
    let det = |v: &Variable| &scene.detections[pick[slot[v]]];
    Ok(match atom {
        Atom::Unary { class, var } => {
            let d = det(var);
            if &d.label == class && d.confidence >= floor {
                d.confidence
            } else {
                0.0
            }
        }
        Atom::Binary { relation, a, b } => {
            let rel: Relation = relation.parse().map_err(|_| InferenceError::UnknownPredicate(relation.clone()))?;
            let (da, db) = (det(a), det(b));
            eval_relation(rel, (pick[slot[a]], &da.obb), (pick[slot[b]], &db.obb), ctx)
        }
        Atom::Metric { predicate, vars, threshold } => {
            let pred: MetricPredicate =
                predicate.parse().map_err(|_| InferenceError::UnknownPredicate(predicate.clone()))?;
            let boxes: Vec<_> = vars.iter().map(|v| &det(v).obb).collect();
            eval_metric_predicate(pred, &boxes, *threshold, ctx)?
        }
        Atom::Isolated { var } => {
            let me = pick[slot[var]];
            let nearest = scene
                .detections
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != me)
                .map(|(_, d)| eval_is_close(&scene.detections[me].obb, &d.obb))
                .fold(0.0, f64::max);
            1.0 - nearest
        }
        Atom::Macro { relation, .. } => return Err(InferenceError::NotNormalized(relation.clone())),
    })
}
