use serde::Serialize;

use super::similarity::SimilarityProvider;
use super::TranslateError;
use crate::fol::{complexity_counts, ConjunctiveQuery};

/// The tier that decided between candidate expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionReason {
    Similarity,
    ConfidenceTie,
    MinimalityTie,
    /// Everything above tied; the earliest sample won.
    IndexTie,
}

/// One parsed sample as seen by the selector.
#[derive(Debug, Clone)]
pub struct Candidate<'a> {
    pub query: &'a ConjunctiveQuery,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub index: usize,
    pub reason: SelectionReason,
    pub similarities: Vec<f64>,
}

const TIE_EPS: f64 = 1e-12;

/// Picks one candidate: highest similarity, then highest confidence, then
/// fewest objects plus predicates, then earliest index. Candidates whose
/// rendered expression repeats an earlier one are folded into it, so a set of
/// identical samples is decided by similarity.
pub fn select_sample(
    candidates: &[Candidate<'_>],
    query: &str,
    sim: &dyn SimilarityProvider,
) -> Result<Selection, TranslateError> {
    if candidates.is_empty() {
        return Err(TranslateError::EmptySampleSet);
    }
    let similarities: Vec<f64> = candidates.iter().map(|c| sim.similarity(query, c.query)).collect();
    let rendered: Vec<String> = candidates.iter().map(|c| c.query.render()).collect();
    let distinct: Vec<usize> = (0..candidates.len())
        .filter(|&i| !rendered[..i].contains(&rendered[i]))
        .collect();

    let best_sim = distinct.iter().map(|&i| similarities[i]).fold(f64::NEG_INFINITY, f64::max);
    let tier1: Vec<usize> = distinct.into_iter().filter(|&i| similarities[i] >= best_sim - TIE_EPS).collect();
    if tier1.len() == 1 {
        return Ok(Selection { index: tier1[0], reason: SelectionReason::Similarity, similarities });
    }

    let best_conf = tier1.iter().map(|&i| candidates[i].confidence).fold(f64::NEG_INFINITY, f64::max);
    let tier2: Vec<usize> = tier1.into_iter().filter(|&i| candidates[i].confidence >= best_conf - TIE_EPS).collect();
    if tier2.len() == 1 {
        return Ok(Selection { index: tier2[0], reason: SelectionReason::ConfidenceTie, similarities });
    }

    let size = |i: usize| complexity_counts(candidates[i].query).size();
    let min_size = tier2.iter().map(|&i| size(i)).min().unwrap_or(0);
    let tier3: Vec<usize> = tier2.into_iter().filter(|&i| size(i) == min_size).collect();
    let reason = if tier3.len() == 1 { SelectionReason::MinimalityTie } else { SelectionReason::IndexTie };
    Ok(Selection { index: tier3[0], reason, similarities })
}
