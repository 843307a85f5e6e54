use serde::Serialize;

use super::{Corpus, RankedRun, RetrievalError};
use crate::fol::{clause_groups, parse_query, Variable};
use crate::geometry::OrientedBox;
use crate::inference::{candidate_sets, AtomScore};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Binding {
    pub variable: Variable,
    pub index: usize,
    pub label: String,
    pub confidence: f64,
    pub obb: OrientedBox,
}

/// Why an image ranked where it did, as data for overlay tools.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Explanation {
    pub query_id: String,
    pub query: String,
    pub image_id: String,
    /// 1-based position in the run.
    pub rank: usize,
    pub probability: f64,
    pub has_witness: bool,
    pub bindings: Vec<Binding>,
    pub per_atom_scores: Vec<AtomScore>,
    /// Variables with no candidate detection in this image.
    pub empty_candidate_variables: Vec<Variable>,
}

pub fn explain(run: &RankedRun, corpus: &Corpus, image_id: &str) -> Result<Explanation, RetrievalError> {
    let rank = run.rank_of(image_id).ok_or_else(|| RetrievalError::UnknownImage(image_id.to_string()))?;
    let scene = corpus.get(image_id).ok_or_else(|| RetrievalError::UnknownImage(image_id.to_string()))?;
    let q = parse_query(&run.query).map_err(|e| RetrievalError::QueryFile { line: 0, message: e.to_string() })?;
    let empty_candidate_variables = clause_groups(&q)
        .iter()
        .flat_map(|g| candidate_sets(g, scene, run.floor))
        .filter(|(_, c)| c.is_empty())
        .map(|(v, _)| v)
        .collect();
    let witness = run.witnesses.get(image_id);
    let bindings = witness
        .map(|w| {
            w.assignment
                .iter()
                .map(|(v, &i)| {
                    let d = &scene.detections[i];
                    Binding { variable: v.clone(), index: d.index, label: d.label.clone(), confidence: d.confidence, obb: d.obb }
                })
                .collect()
        })
        .unwrap_or_default();
    Ok(Explanation {
        query_id: run.query_id.clone(),
        query: run.query.clone(),
        image_id: image_id.to_string(),
        rank: rank + 1,
        probability: run.ranking[rank].probability,
        has_witness: witness.is_some(),
        bindings,
        per_atom_scores: witness.map(|w| w.per_atom_scores.clone()).unwrap_or_default(),
        empty_candidate_variables,
    })
}
