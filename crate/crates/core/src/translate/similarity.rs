use std::collections::BTreeSet;

use crate::fol::{Atom, ConjunctiveQuery};

/// Scores how well an expression reflects the natural-language query, in `[0, 1]`.
pub trait SimilarityProvider: Send + Sync {
    fn similarity(&self, query: &str, expression: &ConjunctiveQuery) -> f64;
}

const STOPWORDS: &[&str] = &[
    "a", "an", "the", "and", "of", "to", "is", "are", "there", "each", "other", "another", "with", "in",
    "on", "at", "by", "from", "that", "which", "one", "two", "three", "four", "five", "six", "seven",
    "eight", "nine", "ten", "some", "all", "image", "images", "containing", "least",
];

fn stem(word: &str) -> String {
    if word.len() > 3 && word.ends_with("ies") {
        format!("{}y", &word[..word.len() - 3])
    } else if word.len() > 3 && word.ends_with('s') && !word.ends_with("ss") {
        word[..word.len() - 1].to_string()
    } else {
        word.to_string()
    }
}

fn content_words(text: &str) -> BTreeSet<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty() && !STOPWORDS.contains(w) && !w.chars().all(|c| c.is_ascii_digit()))
        .map(stem)
        .collect()
}

fn expression_words(q: &ConjunctiveQuery) -> BTreeSet<String> {
    let mut names = String::new();
    for atom in q.atoms() {
        let name = match atom {
            Atom::Unary { class, .. } => class.as_str(),
            Atom::Binary { relation, .. } | Atom::Macro { relation, .. } => relation.as_str(),
            Atom::Metric { predicate, .. } => predicate.as_str(),
            Atom::Isolated { .. } => "isolated",
        };
        names.push(' ');
        names.push_str(&name.to_lowercase().replace('_', " "));
    }
    content_words(&names)
}

/// Jaccard overlap between the query's content words and the words of the
/// class and relation names in the expression, after light plural stemming.
#[derive(Debug, Clone, Copy, Default)]
pub struct JaccardSimilarity;

impl SimilarityProvider for JaccardSimilarity {
    fn similarity(&self, query: &str, expression: &ConjunctiveQuery) -> f64 {
        let a = content_words(query);
        let b = expression_words(expression);
        let union = a.union(&b).count();
        if union == 0 {
            return 0.0;
        }
        a.intersection(&b).count() as f64 / union as f64
    }
}
