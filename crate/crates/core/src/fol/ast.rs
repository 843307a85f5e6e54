use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::FolError;

/// A query variable. Names are stored lower-cased.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl AsRef<str>) -> Self {
        Variable(name.as_ref().to_lowercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Variable {
    fn from(s: &str) -> Self {
        Variable::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Atom {
    /// `class(x)`: detection bound to `x` carries this label.
    Unary { class: String, var: Variable },
    /// `relation(x, y)` over a canonical atomic relation name.
    Binary { relation: String, a: Variable, b: Variable },
    /// A GSD-based predicate with a physical threshold (meters or square meters).
    Metric { predicate: String, vars: Vec<Variable>, threshold: f64 },
    /// Non-atomic relation awaiting expansion by `normalize`.
    Macro { relation: String, vars: Vec<Variable> },
    /// `isolated(x)`: no other detection is close to `x`.
    Isolated { var: Variable },
}

impl Atom {
    pub fn unary(class: &str, var: &str) -> Self {
        Atom::Unary { class: class.to_string(), var: Variable::new(var) }
    }

    pub fn binary(relation: &str, a: &str, b: &str) -> Self {
        Atom::Binary { relation: relation.to_string(), a: Variable::new(a), b: Variable::new(b) }
    }

    pub fn metric(predicate: &str, vars: &[&str], threshold: f64) -> Self {
        Atom::Metric {
            predicate: predicate.to_string(),
            vars: vars.iter().map(Variable::new).collect(),
            threshold,
        }
    }

    pub fn variables(&self) -> Vec<&Variable> {
        match self {
            Atom::Unary { var, .. } | Atom::Isolated { var } => vec![var],
            Atom::Binary { a, b, .. } => vec![a, b],
            Atom::Metric { vars, .. } | Atom::Macro { vars, .. } => vars.iter().collect(),
        }
    }

    /// True for atoms that link variables (edges of the co-occurrence graph).
    pub fn is_relational(&self) -> bool {
        matches!(self, Atom::Binary { .. } | Atom::Metric { .. } | Atom::Macro { .. })
    }

    pub fn is_unary_class(&self) -> bool {
        matches!(self, Atom::Unary { .. })
    }

    pub(crate) fn rename(&self, map: &BTreeMap<Variable, Variable>) -> Atom {
        let r = |v: &Variable| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            Atom::Unary { class, var } => Atom::Unary { class: class.clone(), var: r(var) },
            Atom::Binary { relation, a, b } => {
                Atom::Binary { relation: relation.clone(), a: r(a), b: r(b) }
            }
            Atom::Metric { predicate, vars, threshold } => Atom::Metric {
                predicate: predicate.clone(),
                vars: vars.iter().map(r).collect(),
                threshold: *threshold,
            },
            Atom::Macro { relation, vars } => {
                Atom::Macro { relation: relation.clone(), vars: vars.iter().map(r).collect() }
            }
            Atom::Isolated { var } => Atom::Isolated { var: r(var) },
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(vars: &[Variable]) -> String {
            vars.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(", ")
        }
        match self {
            Atom::Unary { class, var } => write!(f, "{class}({var})"),
            Atom::Binary { relation, a, b } => write!(f, "{relation}({a}, {b})"),
            Atom::Metric { predicate, vars, threshold } => {
                write!(f, "{predicate}({}, {threshold})", join(vars))
            }
            Atom::Macro { relation, vars } => write!(f, "{relation}({})", join(vars)),
            Atom::Isolated { var } => write!(f, "isolated({var})"),
        }
    }
}

/// An existentially quantified conjunction of atoms.
///
/// Every variable carries exactly one unary class atom, and every variable of
/// a relational atom is bound by one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjunctiveQuery {
    atoms: Vec<Atom>,
    variables: Vec<Variable>,
}

impl ConjunctiveQuery {
    pub fn new(atoms: Vec<Atom>) -> Result<Self, FolError> {
        if atoms.is_empty() {
            return Err(FolError::EmptyQuery);
        }
        let mut variables: Vec<Variable> = Vec::new();
        let mut classes: BTreeMap<&Variable, usize> = BTreeMap::new();
        for atom in &atoms {
            for v in atom.variables() {
                if !variables.contains(v) {
                    variables.push(v.clone());
                }
            }
            if let Atom::Unary { var, .. } = atom {
                *classes.entry(var).or_default() += 1;
            }
            if let Atom::Metric { threshold, predicate, .. } = atom {
                if !threshold.is_finite() || *threshold <= 0.0 {
                    return Err(FolError::InvalidThreshold {
                        predicate: predicate.clone(),
                        value: *threshold,
                    });
                }
            }
        }
        for v in &variables {
            match classes.get(v).copied().unwrap_or(0) {
                0 => return Err(FolError::UnboundVariable(v.to_string())),
                1 => {}
                _ => return Err(FolError::ConflictingClass(v.to_string())),
            }
        }
        Ok(ConjunctiveQuery { atoms, variables })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Variables in order of first appearance.
    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn class_of(&self, var: &Variable) -> Option<&str> {
        self.atoms.iter().find_map(|a| match a {
            Atom::Unary { class, var: v } if v == var => Some(class.as_str()),
            _ => None,
        })
    }

    /// Canonical text form: atoms joined by ` AND `, lower-case variables.
    pub fn render(&self) -> String {
        self.atoms.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" AND ")
    }

    /// Applies a variable renaming. Unmapped variables are kept.
    pub fn rename(&self, map: &BTreeMap<Variable, Variable>) -> Result<Self, FolError> {
        ConjunctiveQuery::new(self.atoms.iter().map(|a| a.rename(map)).collect())
    }
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// See [`ConjunctiveQuery::render`].
pub fn render_query(q: &ConjunctiveQuery) -> String {
    q.render()
}
