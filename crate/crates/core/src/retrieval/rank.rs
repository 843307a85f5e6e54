use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Corpus, RetrievalError};
use crate::fol::ConjunctiveQuery;
use crate::geometry::PredicateContext;
use crate::inference::{score_query, ScoredImage, Witness, DEFAULT_FLOOR};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub image_id: String,
    pub probability: f64,
}

/// Ranking of a corpus for one query. Only the top `k` entries are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedRun {
    pub query_id: String,
    /// Canonical rendering of the scored query.
    pub query: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u8>,
    pub floor: f64,
    pub ranking: Vec<RankedEntry>,
    /// Witnesses of the entries with nonzero probability.
    pub witnesses: BTreeMap<String, Witness>,
}

impl RankedRun {
    pub fn rank_of(&self, image_id: &str) -> Option<usize> {
        self.ranking.iter().position(|e| e.image_id == image_id)
    }

    pub fn top_k(&self, k: usize) -> impl Iterator<Item = &str> {
        self.ranking.iter().take(k).map(|e| e.image_id.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrieveOptions {
    pub k: usize,
    pub floor: f64,
    pub ctx: PredicateContext,
    /// Score scenes on the current rayon pool rather than sequentially.
    pub parallel: bool,
}

impl Default for RetrieveOptions {
    fn default() -> Self {
        RetrieveOptions { k: 10, floor: DEFAULT_FLOOR, ctx: PredicateContext::default(), parallel: true }
    }
}

/// Scores every scene and keeps the `k` best, ordered by probability
/// descending and then image id ascending.
pub fn retrieve(
    query_id: &str,
    q: &ConjunctiveQuery,
    corpus: &Corpus,
    opts: &RetrieveOptions,
) -> Result<RankedRun, RetrievalError> {
    if corpus.is_empty() {
        return Err(RetrievalError::EmptyCorpus);
    }
    if opts.k == 0 {
        return Err(RetrievalError::InvalidK);
    }
    let score = |s| {
        score_query(q, s, &opts.ctx, opts.floor)
            .map_err(|source| RetrievalError::Inference { image_id: s.image_id.clone(), source })
    };
    let mut scored: Vec<ScoredImage> = if opts.parallel {
        corpus.scenes().par_iter().map(score).collect::<Result<_, _>>()?
    } else {
        corpus.scenes().iter().map(score).collect::<Result<_, _>>()?
    };
    scored.sort_by(|a, b| b.probability.total_cmp(&a.probability).then_with(|| a.image_id.cmp(&b.image_id)));
    scored.truncate(opts.k);
    let mut witnesses = BTreeMap::new();
    let ranking = scored
        .into_iter()
        .map(|s| {
            if let Some(w) = s.witness {
                witnesses.insert(s.image_id.clone(), w);
            }
            RankedEntry { image_id: s.image_id, probability: s.probability }
        })
        .collect();
    Ok(RankedRun { query_id: query_id.to_string(), query: q.render(), level: None, floor: opts.floor, ranking, witnesses })
}
