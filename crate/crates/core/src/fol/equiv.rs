//! Logical equivalence of conjunctive queries up to variable renaming.
//!
//! Two normalized queries are equivalent when some bijection between their
//! variables maps one atom multiset onto the other. Only class-respecting
//! bijections are tried: a `ship` variable can only map to a `ship` variable.
//! Arguments of symmetric relations are sorted before comparison.

use std::collections::BTreeMap;

use super::ast::{Atom, ConjunctiveQuery, Variable};
use super::FolError;
use crate::vocab::Vocabulary;

pub const DEFAULT_BIJECTION_CAP: u64 = 1_000_000;
pub const MAX_VARIABLES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum AtomKey {
    Unary(String, usize),
    Binary(String, usize, usize),
    Metric(String, Vec<usize>, u64),
    Macro(String, Vec<usize>),
    Isolated(usize),
}

#[derive(Debug, Clone)]
pub struct EquivalenceChecker {
    vocab: Vocabulary,
    cap: u64,
}

impl Default for EquivalenceChecker {
    fn default() -> Self {
        EquivalenceChecker { vocab: Vocabulary::dota(), cap: DEFAULT_BIJECTION_CAP }
    }
}

impl EquivalenceChecker {
    pub fn new(vocab: &Vocabulary) -> Self {
        EquivalenceChecker { vocab: vocab.clone(), cap: DEFAULT_BIJECTION_CAP }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    fn key(&self, atom: &Atom, idx: &dyn Fn(&Variable) -> usize) -> AtomKey {
        match atom {
            Atom::Unary { class, var } => AtomKey::Unary(class.clone(), idx(var)),
            Atom::Binary { relation, a, b } => {
                let (mut x, mut y) = (idx(a), idx(b));
                if self.vocab.is_symmetric(relation) && x > y {
                    std::mem::swap(&mut x, &mut y);
                }
                AtomKey::Binary(relation.clone(), x, y)
            }
            Atom::Metric { predicate, vars, threshold } => {
                let mut xs: Vec<usize> = vars.iter().map(idx).collect();
                if self.vocab.is_symmetric(predicate) {
                    xs.sort_unstable();
                }
                AtomKey::Metric(predicate.clone(), xs, threshold.to_bits())
            }
            Atom::Macro { relation, vars } => {
                let mut xs: Vec<usize> = vars.iter().map(idx).collect();
                if relation == "clustered" {
                    xs.sort_unstable();
                }
                AtomKey::Macro(relation.clone(), xs)
            }
            Atom::Isolated { var } => AtomKey::Isolated(idx(var)),
        }
    }

    fn keys(&self, q: &ConjunctiveQuery, index: &BTreeMap<Variable, usize>) -> Vec<AtomKey> {
        let idx = |v: &Variable| index[v];
        let mut keys: Vec<AtomKey> = q.atoms().iter().map(|a| self.key(a, &idx)).collect();
        keys.sort();
        keys
    }

    pub fn check(&self, a: &ConjunctiveQuery, b: &ConjunctiveQuery) -> Result<bool, FolError> {
        let n = a.variables().len().max(b.variables().len());
        if n > MAX_VARIABLES {
            return Err(FolError::TooManyVariables { variables: n, limit: MAX_VARIABLES as u64 });
        }
        if a.variables().len() != b.variables().len() || a.atoms().len() != b.atoms().len() {
            return Ok(false);
        }

        let by_class = |q: &ConjunctiveQuery| {
            let mut m: BTreeMap<String, Vec<Variable>> = BTreeMap::new();
            for v in q.variables() {
                m.entry(q.class_of(v).unwrap_or_default().to_string()).or_default().push(v.clone());
            }
            m
        };
        let (ca, cb) = (by_class(a), by_class(b));
        if ca.len() != cb.len() || ca.iter().zip(&cb).any(|((k1, v1), (k2, v2))| k1 != k2 || v1.len() != v2.len()) {
            return Ok(false);
        }

        let mut space: u64 = 1;
        for vs in ca.values() {
            for k in 2..=vs.len() as u64 {
                space = space.saturating_mul(k);
            }
        }
        if space > self.cap {
            return Err(FolError::TooManyVariables { variables: n, limit: self.cap });
        }

        let b_index: BTreeMap<Variable, usize> =
            b.variables().iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let target = self.keys(b, &b_index);

        // One permutation per class, advanced like an odometer.
        let classes: Vec<(&Vec<Variable>, &Vec<Variable>)> = ca.values().zip(cb.values()).collect();
        let mut perms: Vec<Vec<usize>> = classes.iter().map(|(va, _)| (0..va.len()).collect()).collect();
        loop {
            let mut map: BTreeMap<Variable, usize> = BTreeMap::new();
            for ((va, vb), perm) in classes.iter().zip(&perms) {
                for (i, v) in va.iter().enumerate() {
                    map.insert(v.clone(), b_index[&vb[perm[i]]]);
                }
            }
            if self.keys(a, &map) == target {
                return Ok(true);
            }
            let mut advanced = false;
            for perm in perms.iter_mut() {
                if next_permutation(perm) {
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                return Ok(false);
            }
        }
    }
}

/// Lexicographic successor; on the last permutation resets to sorted and
/// returns false.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        p.reverse();
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// [`EquivalenceChecker::check`] with the aerial vocabulary's symmetric
/// relations and the default bijection cap.
pub fn logically_equivalent(a: &ConjunctiveQuery, b: &ConjunctiveQuery) -> Result<bool, FolError> {
    EquivalenceChecker::default().check(a, b)
}
