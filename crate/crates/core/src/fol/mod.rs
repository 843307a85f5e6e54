//! Conjunctive first-order queries: syntax, normalization, factorization into
//! independent clause groups, and comparison (equivalence, BLEU).

mod ast;
mod bleu;
mod equiv;
mod groups;
mod normalize;
mod parse;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

pub use ast::{render_query, Atom, ConjunctiveQuery, Variable};
pub use bleu::{fol_bleu, fol_tokens};
pub use equiv::{logically_equivalent, EquivalenceChecker, DEFAULT_BIJECTION_CAP, MAX_VARIABLES};
pub use groups::{clause_groups, ClauseGroup};
pub use normalize::normalize;
pub use parse::{parse_query, snake_case};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FolError {
    #[error("syntax error at byte {position}: expected {expected}, found {found}")]
    Syntax { position: usize, expected: String, found: String },
    #[error("`{name}` takes {expected}, got {found} argument(s)")]
    Arity { name: String, expected: String, found: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("query has no atoms")]
    EmptyQuery,
    #[error("variable `{0}` has no class atom")]
    UnboundVariable(String),
    #[error("variable `{0}` has more than one class atom")]
    ConflictingClass(String),
    #[error("threshold of `{predicate}` must be finite and positive, got {value}")]
    InvalidThreshold { predicate: String, value: f64 },
    #[error("unsupported entity `{0}`: not in the vocabulary")]
    UnsupportedEntity(String),
    #[error("too many variables for equivalence search ({variables}, limit {limit})")]
    TooManyVariables { variables: usize, limit: u64 },
}

/// The three query-complexity indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComplexityCounts {
    pub n_objects: usize,
    pub n_object_types: usize,
    pub n_predicates: usize,
}

impl ComplexityCounts {
    /// Entities plus predicates; the minimality key for sample selection.
    pub fn size(&self) -> usize {
        self.n_objects + self.n_predicates
    }
}

pub fn complexity_counts(q: &ConjunctiveQuery) -> ComplexityCounts {
    let mut types = BTreeSet::new();
    let mut n_predicates = 0;
    for atom in q.atoms() {
        match atom {
            Atom::Unary { class, .. } => {
                types.insert(class.as_str());
            }
            Atom::Binary { .. } | Atom::Metric { .. } => n_predicates += 1,
            Atom::Macro { .. } | Atom::Isolated { .. } => {}
        }
    }
    ComplexityCounts { n_objects: q.variables().len(), n_object_types: types.len(), n_predicates }
}
