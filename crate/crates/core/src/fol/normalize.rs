use super::ast::{Atom, ConjunctiveQuery, Variable};
use super::FolError;
use crate::vocab::Vocabulary;

/// Validates names against `v` and expands macro relations into atomic ones.
///
/// - `aligned(x1..xn)` becomes the chain `left_of(x1, x2), ..., left_of(xn-1, xn)`
/// - `in_column(x1..xn)` becomes the chain `is_above(x1, x2), ...`
/// - `clustered(x1..xn)` becomes `is_close` over every unordered pair
/// - `isolated_from(x)` becomes the marker `isolated(x)`
///
/// Exact duplicate atoms are dropped, keeping the first occurrence.
pub fn normalize(q: &ConjunctiveQuery, v: &Vocabulary) -> Result<ConjunctiveQuery, FolError> {
    let mut out: Vec<Atom> = Vec::with_capacity(q.atoms().len());
    let mut push = |atom: Atom| {
        if !out.contains(&atom) {
            out.push(atom);
        }
    };
    for atom in q.atoms() {
        match atom {
            Atom::Unary { class, .. } => {
                if !v.is_class(class) {
                    return Err(FolError::UnsupportedEntity(class.clone()));
                }
                push(atom.clone());
            }
            Atom::Binary { relation, .. } | Atom::Metric { predicate: relation, .. } => {
                if !v.is_atomic_relation(relation) {
                    return Err(FolError::UnsupportedEntity(relation.clone()));
                }
                push(atom.clone());
            }
            Atom::Isolated { .. } => push(atom.clone()),
            Atom::Macro { relation, vars } => {
                if !v.is_macro_relation(relation) {
                    return Err(FolError::UnsupportedEntity(relation.clone()));
                }
                for expanded in expand_macro(relation, vars, v)? {
                    push(expanded);
                }
            }
        }
    }
    ConjunctiveQuery::new(out)
}

fn expand_macro(relation: &str, vars: &[Variable], v: &Vocabulary) -> Result<Vec<Atom>, FolError> {
    let binary = |rel: &str, a: &Variable, b: &Variable| -> Result<Atom, FolError> {
        if !v.is_atomic_relation(rel) {
            return Err(FolError::UnsupportedEntity(rel.to_string()));
        }
        Ok(Atom::Binary { relation: rel.to_string(), a: a.clone(), b: b.clone() })
    };
    match relation {
        "aligned" => vars.windows(2).map(|w| binary("left_of", &w[0], &w[1])).collect(),
        "in_column" => vars.windows(2).map(|w| binary("is_above", &w[0], &w[1])).collect(),
        "clustered" => {
            let mut atoms = Vec::new();
            for (i, a) in vars.iter().enumerate() {
                for b in &vars[i + 1..] {
                    atoms.push(binary("is_close", a, b)?);
                }
            }
            Ok(atoms)
        }
        "isolated_from" => Ok(vars.iter().map(|x| Atom::Isolated { var: x.clone() }).collect()),
        other => Err(FolError::UnsupportedEntity(other.to_string())),
    }
}
