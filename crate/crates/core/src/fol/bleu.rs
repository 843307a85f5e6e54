use std::collections::HashMap;

use super::FolError;

/// Splits a FOL string into identifiers, numbers, punctuation and `AND`.
/// Identifiers are lower-cased; `and`/`∧`/`&` all become `AND`.
pub fn fol_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, out: &mut Vec<String>| {
        if !cur.is_empty() {
            let t = std::mem::take(cur);
            if t.eq_ignore_ascii_case("and") {
                out.push("AND".to_string());
            } else {
                out.push(t.to_lowercase());
            }
        }
    };
    for c in text.chars() {
        if c.is_alphanumeric() || c == '_' || c == '.' && cur.chars().all(|d| d.is_ascii_digit()) && !cur.is_empty() {
            cur.push(c);
            continue;
        }
        flush(&mut cur, &mut out);
        match c {
            '(' | ')' | ',' => out.push(c.to_string()),
            '∧' | '&' if out.last().is_none_or(|s| s != "AND") => out.push("AND".to_string()),
            _ => {}
        }
    }
    flush(&mut cur, &mut out);
    out
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut m = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

/// BLEU-4 over FOL token streams with uniform weights, add-one smoothing of
/// every n-gram precision and the usual brevity penalty.
pub fn fol_bleu(candidate: &str, reference: &str) -> Result<f64, FolError> {
    let cand = fol_tokens(candidate);
    let refr = fol_tokens(reference);
    if cand.is_empty() || refr.is_empty() {
        return Err(FolError::EmptyInput);
    }
    let mut log_sum = 0.0;
    for n in 1..=4 {
        let c = ngram_counts(&cand, n);
        let r = ngram_counts(&refr, n);
        let total: usize = c.values().sum();
        let clipped: usize = c.iter().map(|(g, k)| (*k).min(r.get(g).copied().unwrap_or(0))).sum();
        let p = (clipped as f64 + 1.0) / (total as f64 + 1.0);
        log_sum += 0.25 * p.ln();
    }
    let (c_len, r_len) = (cand.len() as f64, refr.len() as f64);
    let bp = if c_len > r_len { 1.0 } else { (1.0 - r_len / c_len).exp() };
    Ok((bp * log_sum.exp()).clamp(0.0, 1.0))
}
