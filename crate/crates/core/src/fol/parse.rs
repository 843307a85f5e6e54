//! Recursive-descent parser for conjunctive queries.
//!
//! ```text
//! query := atom (AND atom)* "."?
//! atom  := name "(" arg ("," arg)* ")"
//! arg   := variable | number      (a number only as the last argument)
//! ```
//!
//! `AND` is case-insensitive; `&` and `∧` are accepted as synonyms. Predicate
//! names are folded to snake_case and resolved through an alias table, so
//! `externally_connected`, `ec` and `EC` all denote the same relation.

use super::ast::{Atom, ConjunctiveQuery, Variable};
use super::FolError;
use crate::vocab::{DOTA_CLASSES, FLOOD_EXTRA_CLASSES};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    Comma,
    And,
    Period,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(n) => format!("number {n}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::And => "AND".into(),
            Tok::Period => "`.`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FolError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        match c {
            '(' => {
                chars.next();
                out.push((pos, Tok::LParen));
            }
            ')' => {
                chars.next();
                out.push((pos, Tok::RParen));
            }
            ',' => {
                chars.next();
                out.push((pos, Tok::Comma));
            }
            '.' => {
                chars.next();
                out.push((pos, Tok::Period));
            }
            '∧' => {
                chars.next();
                out.push((pos, Tok::And));
            }
            '&' => {
                chars.next();
                if matches!(chars.peek(), Some(&(_, '&'))) {
                    chars.next();
                }
                out.push((pos, Tok::And));
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' => {
                let mut end = pos;
                let mut s = String::new();
                while let Some(&(i, d)) = chars.peek() {
                    let sign_ok = s.is_empty() && (d == '-' || d == '+');
                    let exp_sign = (d == '-' || d == '+') && s.ends_with(['e', 'E']);
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || sign_ok || exp_sign {
                        s.push(d);
                        end = i + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                // a trailing period belongs to the sentence, not the number
                let (num_text, trailing_period) = match s.strip_suffix('.') {
                    Some(t) => (t.to_string(), true),
                    None => (s.clone(), false),
                };
                let value: f64 = num_text.parse().map_err(|_| FolError::Syntax {
                    position: pos,
                    expected: "a number".into(),
                    found: format!("`{s}`"),
                })?;
                out.push((pos, Tok::Number(value)));
                if trailing_period {
                    out.push((end - 1, Tok::Period));
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if s.eq_ignore_ascii_case("and") {
                    out.push((pos, Tok::And));
                } else {
                    out.push((pos, Tok::Ident(s)));
                }
            }
            other => {
                return Err(FolError::Syntax {
                    position: pos,
                    expected: "an atom".into(),
                    found: format!("`{other}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Folds `isClose`, `Is Close` style names to `is_close`.
pub fn snake_case(name: &str) -> String {
    let mut out = String::with_capacity(name.len() + 4);
    let mut prev: Option<char> = None;
    for c in name.chars() {
        if c == ' ' || c == '-' || c == '_' {
            if !out.ends_with('_') && !out.is_empty() {
                out.push('_');
            }
        } else if c.is_uppercase() {
            if matches!(prev, Some(p) if p.is_lowercase() || p.is_ascii_digit()) && !out.ends_with('_') {
                out.push('_');
            }
            out.extend(c.to_lowercase());
        } else {
            out.push(c);
        }
        prev = Some(c);
    }
    out.trim_end_matches('_').to_string()
}

/// How a predicate name is interpreted after alias resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum NameKind {
    Relation(&'static str),
    Metric(&'static str),
    Macro(&'static str),
    Isolated,
    Other(String),
}

pub(crate) fn classify(raw: &str) -> NameKind {
    let s = snake_case(raw);
    let rel = |n: &'static str| NameKind::Relation(n);
    match s.as_str() {
        "is_close" | "close" | "near" | "is_near" | "close_to" | "is_close_to" => rel("is_close"),
        "left_of" | "is_left_of" | "to_the_left_of" => rel("left_of"),
        "right_of" | "is_right_of" | "to_the_right_of" => rel("right_of"),
        "is_above" | "above" => rel("is_above"),
        "is_below" | "below" => rel("is_below"),
        "is_different" | "different" => rel("is_different"),
        "facing_same" | "faces_same" => rel("facing_same"),
        "facing_opposite" | "faces_opposite" => rel("facing_opposite"),
        "dc" | "disconnected" => rel("DC"),
        "ec" | "externally_connected" => rel("EC"),
        "po" | "partially_overlapping" | "partially_overlaps" => rel("PO"),
        "tpp" | "ttp" | "tangential_proper_part" => rel("TPP"),
        "ntpp" | "nttp" | "is_on" | "non_tangential_proper_part" | "inside" => rel("NTPP"),
        "eq" | "equal" | "equals" => rel("EQ"),
        "tppi" | "ttpi" | "tangential_proper_part_inverse" => rel("TPPI"),
        "ntppi" | "nttpi" | "non_tangential_proper_part_inverse" => rel("NTPPI"),
        "is_close_meters" | "close_meters" => NameKind::Metric("is_close_meters"),
        "is_square_meters" | "square_meters" => NameKind::Metric("is_square_meters"),
        "aligned" | "are_aligned" => NameKind::Macro("aligned"),
        "in_column" | "in_a_column" => NameKind::Macro("in_column"),
        "clustered" | "are_clustered" => NameKind::Macro("clustered"),
        "isolated_from" => NameKind::Macro("isolated_from"),
        "isolated" | "is_isolated" => NameKind::Isolated,
        _ => NameKind::Other(s),
    }
}

fn is_known_class(name: &str) -> bool {
    DOTA_CLASSES.contains(&name) || FLOOD_EXTRA_CLASSES.contains(&name)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn error(&self, expected: &str) -> FolError {
        FolError::Syntax {
            position: self.here(),
            expected: expected.to_string(),
            found: self.peek().map(Tok::describe).unwrap_or_else(|| "end of input".into()),
        }
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<(), FolError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn query(&mut self) -> Result<Vec<Atom>, FolError> {
        let mut atoms = vec![self.atom()?];
        loop {
            match self.peek() {
                Some(Tok::And) => {
                    self.pos += 1;
                    atoms.push(self.atom()?);
                }
                Some(Tok::Period) if self.pos + 1 == self.toks.len() => {
                    self.pos += 1;
                }
                None => return Ok(atoms),
                _ => return Err(self.error("AND or end of input")),
            }
        }
    }

    fn atom(&mut self) -> Result<Atom, FolError> {
        let name = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return Err(self.error("a predicate name")),
        };
        self.pos += 1;
        self.expect(Tok::LParen, "`(`")?;
        let mut vars: Vec<Variable> = Vec::new();
        let mut threshold: Option<f64> = None;
        loop {
            match self.peek().cloned() {
                Some(Tok::Ident(v)) if threshold.is_none() => {
                    self.pos += 1;
                    vars.push(Variable::new(v));
                }
                Some(Tok::Number(n)) if threshold.is_none() => {
                    self.pos += 1;
                    threshold = Some(n);
                }
                _ => {
                    let what = if threshold.is_some() { "`)`" } else { "a variable or number" };
                    return Err(self.error(what));
                }
            }
            match self.peek() {
                Some(Tok::Comma) if threshold.is_none() => self.pos += 1,
                Some(Tok::RParen) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.error(if threshold.is_some() { "`)`" } else { "`,` or `)`" })),
            }
        }
        build_atom(&name, vars, threshold)
    }
}

fn arity(name: &str, expected: &str, vars: &[Variable], threshold: Option<f64>) -> FolError {
    FolError::Arity {
        name: name.to_string(),
        expected: expected.to_string(),
        found: vars.len() + usize::from(threshold.is_some()),
    }
}

fn build_atom(raw: &str, vars: Vec<Variable>, threshold: Option<f64>) -> Result<Atom, FolError> {
    match classify(raw) {
        NameKind::Relation(rel) => {
            if vars.len() != 2 || threshold.is_some() {
                return Err(arity(rel, "2 variables", &vars, threshold));
            }
            let mut it = vars.into_iter();
            let (a, b) = (it.next().unwrap(), it.next().unwrap());
            Ok(Atom::Binary { relation: rel.to_string(), a, b })
        }
        NameKind::Metric(pred) => {
            let want = if pred == "is_square_meters" { 1 } else { 2 };
            match threshold {
                Some(t) if vars.len() == want => {
                    Ok(Atom::Metric { predicate: pred.to_string(), vars, threshold: t })
                }
                _ => Err(arity(pred, &format!("{want} variable(s) and a threshold"), &vars, threshold)),
            }
        }
        NameKind::Macro(m) => {
            let ok = if m == "isolated_from" { vars.len() == 1 } else { vars.len() >= 2 };
            if !ok || threshold.is_some() {
                let want = if m == "isolated_from" { "1 variable" } else { "at least 2 variables" };
                return Err(arity(m, want, &vars, threshold));
            }
            Ok(Atom::Macro { relation: m.to_string(), vars })
        }
        NameKind::Isolated => {
            if vars.len() != 1 || threshold.is_some() {
                return Err(arity("isolated", "1 variable", &vars, threshold));
            }
            Ok(Atom::Isolated { var: vars.into_iter().next().unwrap() })
        }
        NameKind::Other(name) => {
            if let Some(t) = threshold {
                return Ok(Atom::Metric { predicate: name, vars, threshold: t });
            }
            if is_known_class(&name) && vars.len() != 1 {
                return Err(arity(&name, "1 variable", &vars, threshold));
            }
            let mut it = vars.into_iter();
            match (it.next(), it.next(), it.next()) {
                (Some(var), None, None) => Ok(Atom::Unary { class: name, var }),
                (Some(a), Some(b), None) => Ok(Atom::Binary { relation: name, a, b }),
                (a, b, c) => {
                    let n = [a.is_some(), b.is_some(), c.is_some()].iter().filter(|x| **x).count()
                        + it.count();
                    Err(FolError::Arity { name, expected: "1 or 2 variables".into(), found: n })
                }
            }
        }
    }
}

/// Parses a conjunctive query. Variables are lower-cased and predicate names
/// canonicalized; class and relation names are not checked against any
/// vocabulary here (see [`super::normalize`]).
pub fn parse_query(text: &str) -> Result<ConjunctiveQuery, FolError> {
    if text.trim().is_empty() {
        return Err(FolError::EmptyInput);
    }
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let atoms = p.query()?;
    ConjunctiveQuery::new(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_close_ships() {
        let q = parse_query("ship(A) AND ship(B) AND is_close(A, B)").unwrap();
        assert_eq!(
            q.atoms(),
            &[Atom::unary("ship", "a"), Atom::unary("ship", "b"), Atom::binary("is_close", "a", "b")]
        );
        assert_eq!(q.variables().len(), 2);
    }

    #[test]
    fn minimal_query() {
        let q = parse_query("plane(a)").unwrap();
        assert_eq!(q.atoms().len(), 1);
        assert_eq!(q.variables(), &[Variable::new("a")]);
    }

    #[test]
    fn metric_atom_round_trips() {
        let q = parse_query("car(a) and car(b) and is_close_meters(a, b, 50)").unwrap();
        assert_eq!(q.atoms()[2], Atom::metric("is_close_meters", &["a", "b"], 50.0));
        let again = parse_query(&q.render()).unwrap();
        assert_eq!(again, q);
        assert_eq!(q.render(), "car(a) AND car(b) AND is_close_meters(a, b, 50)");
    }

    #[test]
    fn lowercase_and_and_trailing_period() {
        let q = parse_query("truck(a) and truck(b) and is_close(a, b).").unwrap();
        assert_eq!(q.atoms().len(), 3);
    }

    #[test]
    fn aliases_resolve() {
        let q = parse_query("building(a) AND road_flooded(b) AND externally_connected(a, b)").unwrap();
        assert_eq!(q.atoms()[2], Atom::binary("EC", "a", "b"));
        let q = parse_query("plane(a) AND plane(b) AND isLeftOf(a, b)").unwrap();
        assert_eq!(q.atoms()[2], Atom::binary("left_of", "a", "b"));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_query("ship(A) AND ship(B").unwrap_err();
        match err {
            FolError::Syntax { position, expected, .. } => {
                assert_eq!(position, 18);
                assert!(expected.contains(')'));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_query("ship(A) ship(B)"), Err(FolError::Syntax { position: 8, .. })));
        assert!(matches!(parse_query("ship A"), Err(FolError::Syntax { .. })));
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(
            parse_query("ship(a) AND is_close(a)"),
            Err(FolError::Arity { found: 1, .. })
        ));
        assert!(matches!(parse_query("ship(a, b)"), Err(FolError::Arity { found: 2, .. })));
        assert!(matches!(
            parse_query("ship(a) AND ship(b) AND left_of(a, b, 3)"),
            Err(FolError::Arity { .. })
        ));
    }

    #[test]
    fn empty_input() {
        assert!(matches!(parse_query("   "), Err(FolError::EmptyInput)));
    }

    #[test]
    fn snake_case_folding() {
        assert_eq!(snake_case("isClose"), "is_close");
        assert_eq!(snake_case("Storage Tank"), "storage_tank");
        assert_eq!(snake_case("EC"), "ec");
        assert_eq!(snake_case("left__of"), "left_of");
    }
}
