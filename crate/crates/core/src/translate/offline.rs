//! A deterministic pattern translator for a small family of query shapes:
//! counted objects, optionally followed by a group relation ("aligned",
//! "in column", "clustered", "close to each other", "isolated") or by a
//! binary relation and a second counted object. Clauses are joined by "and"
//! or commas.

use super::TranslateError;
use crate::fol::{normalize, Atom, ConjunctiveQuery, Variable};
use crate::vocab::Vocabulary;

const PREFIXES: &[&str] = &[
    "there are", "there is", "images containing", "images with", "an image with", "an image of", "image with",
    "images of", "find", "show me", "show",
];

const ALIASES: &[(&str, &str)] = &[
    ("tank", "storage_tank"),
    ("airplane", "plane"),
    ("aircraft", "plane"),
    ("boat", "ship"),
    ("vessel", "ship"),
    ("soccer field", "soccer_ball_field"),
    ("football field", "soccer_ball_field"),
    ("track field", "ground_track_field"),
    ("pool", "swimming_pool"),
    ("baseball field", "baseball_diamond"),
    ("port", "harbor"),
    ("house", "building"),
    ("flooded road", "road_flooded"),
];

#[derive(Clone, Copy)]
enum Group {
    Close,
    Aligned,
    Column,
    Clustered,
    Isolated,
}

const GROUP_PHRASES: &[(&str, Group)] = &[
    ("close to each other", Group::Close),
    ("near each other", Group::Close),
    ("next to each other", Group::Close),
    ("close together", Group::Close),
    ("aligned", Group::Aligned),
    ("in a row", Group::Aligned),
    ("in line", Group::Aligned),
    ("in column", Group::Column),
    ("in a column", Group::Column),
    ("clustered", Group::Clustered),
    ("in a cluster", Group::Clustered),
    ("isolated", Group::Isolated),
];

const BINARY_PHRASES: &[(&str, &str)] = &[
    ("to the left of", "left_of"),
    ("on the left of", "left_of"),
    ("left of", "left_of"),
    ("to the right of", "right_of"),
    ("on the right of", "right_of"),
    ("right of", "right_of"),
    ("above", "is_above"),
    ("over", "is_above"),
    ("below", "is_below"),
    ("under", "is_below"),
    ("beneath", "is_below"),
    ("inside", "NTPP"),
    ("within", "NTPP"),
    ("on top of", "NTPP"),
    ("on", "NTPP"),
    ("in", "NTPP"),
    ("externally connected to", "EC"),
    ("connected to", "EC"),
    ("adjacent to", "EC"),
    ("touching", "EC"),
    ("bordering", "EC"),
    ("surrounded by", "EC"),
    ("close to", "is_close"),
    ("near", "is_close"),
    ("next to", "is_close"),
    ("beside", "is_close"),
];

fn count_word(w: &str) -> Option<usize> {
    Some(match w {
        "a" | "an" | "one" | "another" | "single" => 1,
        "two" | "pair" => 2,
        "three" => 3,
        "four" => 4,
        "five" => 5,
        "six" => 6,
        "seven" => 7,
        "eight" => 8,
        "nine" => 9,
        "ten" => 10,
        _ => return w.parse().ok().filter(|&n| n > 0),
    })
}

fn starts_with(words: &[&str], phrase: &str) -> Option<usize> {
    let p: Vec<&str> = phrase.split(' ').collect();
    (words.len() >= p.len() && words[..p.len()] == p[..]).then_some(p.len())
}

struct Entity {
    count: usize,
    class: String,
    isolated: bool,
    flooded: bool,
}

struct Parser<'v> {
    classes: Vec<(Vec<String>, String)>,
    vocab: &'v Vocabulary,
    atoms: Vec<Atom>,
    next_var: usize,
}

impl<'v> Parser<'v> {
    fn new(vocab: &'v Vocabulary) -> Self {
        let mut classes = Vec::new();
        let mut add = |phrase: &str, class: &str| {
            let words: Vec<String> = phrase.split(' ').map(str::to_string).collect();
            let mut plural = words.clone();
            if let Some(last) = plural.last_mut() {
                last.push('s');
            }
            classes.push((words, class.to_string()));
            classes.push((plural, class.to_string()));
        };
        for c in vocab.object_classes() {
            add(&c.replace('_', " "), c);
        }
        for (alias, class) in ALIASES {
            if vocab.is_class(class) {
                add(alias, class);
            }
        }
        classes.sort_by_key(|c| std::cmp::Reverse(c.0.len()));
        Parser { classes, vocab, atoms: Vec::new(), next_var: 0 }
    }

    fn fresh(&mut self) -> Variable {
        let i = self.next_var;
        self.next_var += 1;
        if i < 26 {
            Variable::new(((b'a' + i as u8) as char).to_string())
        } else {
            Variable::new(format!("v{i}"))
        }
    }

    fn entity(&self, words: &[&str]) -> Option<(Entity, usize)> {
        let mut i = 0;
        if let Some(n) = starts_with(words, "at least") {
            i += n;
        }
        let count = words.get(i).and_then(|w| count_word(w));
        if count.is_some() {
            i += 1;
            if words.get(i) == Some(&"of") {
                i += 1;
            }
        }
        let (mut isolated, mut flooded) = (false, false);
        loop {
            match words.get(i) {
                Some(&"isolated") => isolated = true,
                Some(&"flooded") if self.class_at(&words[i..]).is_none() => flooded = true,
                _ => break,
            }
            i += 1;
        }
        let (class, n) = self.class_at(&words[i..])?;
        Some((Entity { count: count.unwrap_or(1), class, isolated, flooded }, i + n))
    }

    fn class_at(&self, words: &[&str]) -> Option<(String, usize)> {
        self.classes
            .iter()
            .find(|(phrase, _)| words.len() >= phrase.len() && phrase.iter().zip(words).all(|(p, w)| p == w))
            .map(|(phrase, class)| (class.clone(), phrase.len()))
    }

    fn bind(&mut self, e: &Entity) -> Vec<Variable> {
        let vars: Vec<Variable> = (0..e.count).map(|_| self.fresh()).collect();
        for v in &vars {
            self.atoms.push(Atom::Unary { class: e.class.clone(), var: v.clone() });
            if e.isolated {
                self.atoms.push(Atom::Isolated { var: v.clone() });
            }
        }
        if e.flooded {
            // a flooded building touches a flooded road
            if !self.vocab.is_class("road_flooded") {
                return vars;
            }
            let road = self.fresh();
            self.atoms.push(Atom::Unary { class: "road_flooded".into(), var: road.clone() });
            for v in &vars {
                self.atoms.push(Atom::binary("EC", v.as_str(), road.as_str()));
            }
        }
        vars
    }

    fn clause(&mut self, words: &[&str]) -> Result<(), TranslateError> {
        let shape = || TranslateError::UnsupportedQueryShape(words.join(" "));
        let (first, used) = self.entity(words).ok_or_else(shape)?;
        if first.flooded && !self.vocab.is_class("road_flooded") {
            return Err(shape());
        }
        let rest = &words[used..];
        let rest = match rest.first() {
            Some(&"are") | Some(&"is") if rest.len() > 1 => &rest[1..],
            _ => rest,
        };
        if rest.is_empty() {
            self.bind(&first);
            return Ok(());
        }
        if let Some((group, n)) = GROUP_PHRASES.iter().find_map(|(p, g)| starts_with(rest, p).map(|n| (*g, n))) {
            if n != rest.len() {
                return Err(shape());
            }
            let vars = self.bind(&first);
            let macro_atom = |relation: &str, vars: &[Variable]| Atom::Macro { relation: relation.into(), vars: vars.to_vec() };
            match group {
                Group::Isolated => {
                    for v in vars {
                        self.atoms.push(Atom::Isolated { var: v });
                    }
                }
                _ if vars.len() < 2 => return Err(shape()),
                Group::Close if vars.len() == 2 => self.atoms.push(Atom::binary("is_close", vars[0].as_str(), vars[1].as_str())),
                Group::Close | Group::Clustered => self.atoms.push(macro_atom("clustered", &vars)),
                Group::Aligned => self.atoms.push(macro_atom("aligned", &vars)),
                Group::Column => self.atoms.push(macro_atom("in_column", &vars)),
            }
            return Ok(());
        }
        let (relation, n) = BINARY_PHRASES
            .iter()
            .find_map(|(p, r)| starts_with(rest, p).map(|n| (*r, n)))
            .ok_or_else(shape)?;
        let (second, used2) = self.entity(&rest[n..]).ok_or_else(shape)?;
        if used2 != rest.len() - n || (second.flooded && !self.vocab.is_class("road_flooded")) {
            return Err(shape());
        }
        let left = self.bind(&first);
        let right = self.bind(&second);
        for a in &left {
            for b in &right {
                self.atoms.push(Atom::binary(relation, a.as_str(), b.as_str()));
            }
        }
        Ok(())
    }
}

/// Translates a query from the supported template family into a normalized
/// conjunctive query over `v`.
pub fn offline_translate(query: &str, v: &Vocabulary) -> Result<ConjunctiveQuery, TranslateError> {
    let lowered = query.trim().trim_end_matches(['.', '?', '!']).to_lowercase().replace(',', " , ");
    let mut words: Vec<&str> = lowered.split_whitespace().collect();
    if let Some(n) = PREFIXES.iter().find_map(|p| starts_with(&words, p)) {
        words.drain(..n);
    }
    if words.is_empty() {
        return Err(TranslateError::UnsupportedQueryShape(query.trim().to_string()));
    }
    let mut parser = Parser::new(v);
    for clause in words.split(|w| *w == "and" || *w == ",") {
        if clause.is_empty() {
            continue;
        }
        parser.clause(clause)?;
    }
    let q = ConjunctiveQuery::new(parser.atoms).map_err(|e| TranslateError::UnsupportedQueryShape(e.to_string()))?;
    normalize(&q, v).map_err(|e| TranslateError::UnsupportedQueryShape(e.to_string()))
}
