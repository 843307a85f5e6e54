//! Factorized scoring: each clause group is searched independently over its
//! candidate detections and the group maxima are multiplied.
//!
//! Within a group, assignments are injective (two variables never bind the
//! same detection) and explored in lexicographic order of detection indices,
//! so the first assignment reaching the maximum is the witness. Every factor
//! lies in `[0, 1]`, which makes the running product an upper bound on every
//! completion; branches whose bound cannot beat the incumbent are cut.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::scene::Scene;
use super::InferenceError;
use crate::fol::{clause_groups, Atom, ClauseGroup, ConjunctiveQuery, Variable};
use crate::geometry::{eval_is_close, eval_metric_predicate, eval_relation, Gsd, MetricPredicate, PredicateContext, Relation};

/// Detections below this confidence never become candidates.
pub const DEFAULT_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchStrategy {
    /// Cut branches that cannot beat the best assignment found so far.
    #[default]
    BranchAndBound,
    /// Visit every injective assignment.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomScore {
    pub atom: String,
    pub score: f64,
}

/// The argmax assignment of query variables to detection indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub assignment: BTreeMap<Variable, usize>,
    pub per_atom_scores: Vec<AtomScore>,
}

impl Witness {
    pub fn product(&self) -> f64 {
        self.per_atom_scores.iter().map(|s| s.score).product()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupScore {
    pub score: f64,
    /// `None` when no assignment scores above zero.
    pub witness: Option<Witness>,
    /// Size of the injective assignment space of the group.
    pub count: u128,
    /// Complete assignments actually reached by the search.
    pub leaves_visited: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoredImage {
    pub image_id: String,
    pub probability: f64,
    pub witness: Option<Witness>,
    pub hypotheses_evaluated: u128,
}

/// For each variable of `group`, the indices of detections whose label is the
/// variable's class and whose confidence is at least `floor`.
pub fn candidate_sets(group: &ClauseGroup, scene: &Scene, floor: f64) -> BTreeMap<Variable, Vec<usize>> {
    let mut out = BTreeMap::new();
    for var in &group.variables {
        let class = group.atoms.iter().find_map(|a| match a {
            Atom::Unary { class, var: v } if v == var => Some(class.as_str()),
            _ => None,
        });
        let cands = match class {
            Some(class) => scene
                .detections
                .iter()
                .enumerate()
                .filter(|(_, d)| d.label == class && d.confidence >= floor)
                .map(|(i, _)| i)
                .collect(),
            None => Vec::new(),
        };
        out.insert(var.clone(), cands);
    }
    out
}

enum Check {
    Unary { var: usize, atom: usize },
    Relation { rel: Relation, a: usize, b: usize, atom: usize },
    Metric { pred: MetricPredicate, vars: Vec<usize>, threshold: f64, atom: usize },
    Isolated { var: usize, atom: usize },
}

impl Check {
    fn atom(&self) -> usize {
        match self {
            Check::Unary { atom, .. }
            | Check::Relation { atom, .. }
            | Check::Metric { atom, .. }
            | Check::Isolated { atom, .. } => *atom,
        }
    }
}

/// Per-scene evaluation state shared by all groups of one query.
pub(crate) struct Evaluator<'s> {
    scene: &'s Scene,
    ctx: PredicateContext,
    gsd: Option<Gsd>,
    isolation: Vec<Option<f64>>,
}

impl<'s> Evaluator<'s> {
    pub(crate) fn new(scene: &'s Scene, ctx: &PredicateContext) -> Self {
        let ctx = ctx.with_gsd(scene.gsd.or(ctx.gsd));
        let gsd = ctx.resolved_gsd().ok();
        Evaluator { scene, ctx, gsd, isolation: vec![None; scene.detections.len()] }
    }

    /// `1 - max` closeness to any other detection of the scene.
    pub(crate) fn isolation(&mut self, i: usize) -> f64 {
        if let Some(v) = self.isolation[i] {
            return v;
        }
        let me = &self.scene.detections[i].obb;
        let nearest = self
            .scene
            .detections
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, d)| eval_is_close(me, &d.obb))
            .fold(0.0, f64::max);
        let v = 1.0 - nearest;
        self.isolation[i] = Some(v);
        v
    }

    pub(crate) fn relation(&self, rel: Relation, i: usize, j: usize) -> f64 {
        let d = &self.scene.detections;
        eval_relation(rel, (i, &d[i].obb), (j, &d[j].obb), &self.ctx)
    }

    pub(crate) fn metric(&self, pred: MetricPredicate, idx: &[usize], threshold: f64) -> Result<f64, InferenceError> {
        if self.gsd.is_none() {
            return Err(InferenceError::MissingGsd(self.scene.image_id.clone()));
        }
        let boxes: Vec<_> = idx.iter().map(|&i| &self.scene.detections[i].obb).collect();
        Ok(eval_metric_predicate(pred, &boxes, threshold, &self.ctx)?)
    }

    fn check(&mut self, c: &Check, binding: &[usize]) -> Result<f64, InferenceError> {
        Ok(match c {
            Check::Unary { var, .. } => self.scene.detections[binding[*var]].confidence,
            Check::Relation { rel, a, b, .. } => self.relation(*rel, binding[*a], binding[*b]),
            Check::Metric { pred, vars, threshold, .. } => {
                let idx: Vec<usize> = vars.iter().map(|&v| binding[v]).collect();
                self.metric(*pred, &idx, *threshold)?
            }
            Check::Isolated { var, .. } => self.isolation(binding[*var]),
        })
    }
}

struct CompiledGroup {
    candidates: Vec<Vec<usize>>,
    /// `checks[d]` holds the atoms whose last variable is bound at depth `d`.
    checks: Vec<Vec<Check>>,
}

fn compile(group: &ClauseGroup, scene: &Scene, floor: f64) -> Result<CompiledGroup, InferenceError> {
    let pos = |v: &Variable| group.variables.iter().position(|x| x == v).expect("group variable");
    let cand_map = candidate_sets(group, scene, floor);
    let candidates = group.variables.iter().map(|v| cand_map[v].clone()).collect();
    let mut checks: Vec<Vec<Check>> = (0..group.variables.len()).map(|_| Vec::new()).collect();
    for (atom_idx, atom) in group.atoms.iter().enumerate() {
        let (depth, check) = match atom {
            Atom::Unary { var, .. } => {
                let v = pos(var);
                (v, Check::Unary { var: v, atom: atom_idx })
            }
            Atom::Binary { relation, a, b } => {
                let rel: Relation = relation.parse().map_err(|_| InferenceError::UnknownPredicate(relation.clone()))?;
                let (a, b) = (pos(a), pos(b));
                (a.max(b), Check::Relation { rel, a, b, atom: atom_idx })
            }
            Atom::Metric { predicate, vars, threshold } => {
                let pred: MetricPredicate =
                    predicate.parse().map_err(|_| InferenceError::UnknownPredicate(predicate.clone()))?;
                if vars.len() != pred.arity() {
                    return Err(InferenceError::UnknownPredicate(format!("{predicate}/{}", vars.len())));
                }
                let vs: Vec<usize> = vars.iter().map(pos).collect();
                let depth = vs.iter().copied().max().unwrap_or(0);
                (depth, Check::Metric { pred, vars: vs, threshold: *threshold, atom: atom_idx })
            }
            Atom::Isolated { var } => {
                let v = pos(var);
                (v, Check::Isolated { var: v, atom: atom_idx })
            }
            Atom::Macro { relation, .. } => return Err(InferenceError::NotNormalized(relation.clone())),
        };
        checks[depth].push(check);
    }
    Ok(CompiledGroup { candidates, checks })
}

/// Number of injective assignments: candidate lists of one class are
/// identical and lists of different classes are disjoint, so the count is a
/// product of falling factorials.
fn injective_space(group: &ClauseGroup, candidates: &[Vec<usize>]) -> u128 {
    let mut per_class: BTreeMap<&str, (u128, u128)> = BTreeMap::new();
    for (i, var) in group.variables.iter().enumerate() {
        let class = group
            .atoms
            .iter()
            .find_map(|a| match a {
                Atom::Unary { class, var: v } if v == var => Some(class.as_str()),
                _ => None,
            })
            .unwrap_or("");
        let e = per_class.entry(class).or_insert((candidates[i].len() as u128, 0));
        e.1 += 1;
    }
    per_class.values().fold(1u128, |acc, &(n, k)| {
        let mut f: u128 = 1;
        for j in 0..k {
            f = f.saturating_mul(n.saturating_sub(j));
        }
        acc.saturating_mul(f)
    })
}

struct Search<'a, 's> {
    compiled: &'a CompiledGroup,
    eval: &'a mut Evaluator<'s>,
    strategy: SearchStrategy,
    binding: Vec<usize>,
    factors: Vec<f64>,
    used: Vec<bool>,
    best: f64,
    best_binding: Option<(Vec<usize>, Vec<f64>)>,
    leaves: u128,
}

impl Search<'_, '_> {
    fn run(&mut self, depth: usize, partial: f64) -> Result<(), InferenceError> {
        let n_vars = self.compiled.candidates.len();
        if depth == n_vars {
            self.leaves += 1;
            if partial > self.best {
                self.best = partial;
                self.best_binding = Some((self.binding.clone(), self.factors.clone()));
            }
            return Ok(());
        }
        for &cand in &self.compiled.candidates[depth] {
            if self.used[cand] {
                continue;
            }
            self.binding[depth] = cand;
            let mut p = partial;
            for check in &self.compiled.checks[depth] {
                let v = self.eval.check(check, &self.binding)?;
                self.factors[check.atom()] = v;
                p *= v;
            }
            if self.strategy == SearchStrategy::BranchAndBound && p <= self.best {
                continue;
            }
            self.used[cand] = true;
            self.run(depth + 1, p)?;
            self.used[cand] = false;
        }
        Ok(())
    }
}

pub(crate) fn score_group_with(
    group: &ClauseGroup,
    eval: &mut Evaluator<'_>,
    floor: f64,
    strategy: SearchStrategy,
) -> Result<GroupScore, InferenceError> {
    let compiled = compile(group, eval.scene, floor)?;
    if eval.gsd.is_none() && group.atoms.iter().any(|a| matches!(a, Atom::Metric { .. })) {
        return Err(InferenceError::MissingGsd(eval.scene.image_id.clone()));
    }
    let count = injective_space(group, &compiled.candidates);
    let n = eval.scene.detections.len();
    let mut search = Search {
        compiled: &compiled,
        eval,
        strategy,
        binding: vec![0; group.variables.len()],
        factors: vec![0.0; group.atoms.len()],
        used: vec![false; n],
        best: 0.0,
        best_binding: None,
        leaves: 0,
    };
    search.run(0, 1.0)?;
    let witness = search.best_binding.take().map(|(binding, factors)| Witness {
        assignment: group.variables.iter().cloned().zip(binding).collect(),
        per_atom_scores: group
            .atoms
            .iter()
            .zip(factors)
            .map(|(a, score)| AtomScore { atom: a.to_string(), score })
            .collect(),
    });
    Ok(GroupScore { score: search.best, witness, count, leaves_visited: search.leaves })
}

pub fn score_group(
    group: &ClauseGroup,
    scene: &Scene,
    ctx: &PredicateContext,
    floor: f64,
) -> Result<GroupScore, InferenceError> {
    score_group_with(group, &mut Evaluator::new(scene, ctx), floor, SearchStrategy::default())
}

/// Scores `q` (which must be normalized) against one scene.
pub fn score_query(
    q: &ConjunctiveQuery,
    scene: &Scene,
    ctx: &PredicateContext,
    floor: f64,
) -> Result<ScoredImage, InferenceError> {
    score_query_with(q, scene, ctx, floor, SearchStrategy::default())
}

pub fn score_query_with(
    q: &ConjunctiveQuery,
    scene: &Scene,
    ctx: &PredicateContext,
    floor: f64,
    strategy: SearchStrategy,
) -> Result<ScoredImage, InferenceError> {
    let mut eval = Evaluator::new(scene, ctx);
    let mut probability = 1.0;
    let mut hypotheses: u128 = 0;
    let mut assignment = BTreeMap::new();
    let mut scores: Vec<(usize, AtomScore)> = Vec::new();
    let mut complete = true;
    for group in clause_groups(q) {
        let gs = score_group_with(&group, &mut eval, floor, strategy)?;
        hypotheses = hypotheses.saturating_add(gs.count);
        probability *= gs.score;
        match gs.witness {
            Some(w) if complete => {
                assignment.extend(w.assignment);
                for (atom, s) in group.atoms.iter().zip(w.per_atom_scores) {
                    let at = q.atoms().iter().position(|x| x == atom).unwrap_or(usize::MAX);
                    scores.push((at, s));
                }
            }
            _ => complete = false,
        }
    }
    let witness = if complete && probability > 0.0 {
        scores.sort_by_key(|(i, _)| *i);
        Some(Witness { assignment, per_atom_scores: scores.into_iter().map(|(_, s)| s).collect() })
    } else {
        probability = 0.0;
        None
    };
    Ok(ScoredImage { image_id: scene.image_id.clone(), probability, witness, hypotheses_evaluated: hypotheses })
}
