//! Natural-language to FOL translation through a chat model, with repeated
//! sampling and a deterministic choice among the valid samples.

mod client;
mod offline;
mod prompt;
mod select;
mod similarity;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::fol::{normalize, parse_query, ConjunctiveQuery};
use crate::vocab::Vocabulary;

pub use client::{parse_chat_response, ChatClient, ChatRequest, ChatSample, HttpChatClient, OfflineClient, TranslatorConfig};
pub use offline::offline_translate;
pub use prompt::{build_prompt, PromptDocument, FEW_SHOT, REQUEST_PREFIX};
pub use select::{select_sample, Candidate, Selection, SelectionReason};
pub use similarity::{JaccardSimilarity, SimilarityProvider};

/// Confidence assumed when the backend reports none.
pub const NEUTRAL_CONFIDENCE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TranslateError {
    #[error("none of the {0} samples produced a valid expression")]
    NoValidSample(usize),
    #[error("translation backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("no samples to select from")]
    EmptySampleSet,
    #[error("unsupported query shape near `{0}`")]
    UnsupportedQueryShape(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationSample {
    pub fol_text: String,
    pub llm_confidence: f64,
    pub raw_response: String,
    /// Why the sample was excluded; `None` for valid samples.
    pub error: Option<String>,
    #[serde(skip)]
    pub parsed: Option<ConjunctiveQuery>,
}

impl TranslationSample {
    pub fn is_valid(&self) -> bool {
        self.parsed.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationResult {
    pub chosen: ConjunctiveQuery,
    pub chosen_index: usize,
    pub samples: Vec<TranslationSample>,
    /// Similarity of each sample to the query; `None` for invalid samples.
    pub similarity_scores: Vec<Option<f64>>,
    pub selection_reason: SelectionReason,
}

/// Finds the first JSON object in `text` that has a `translations` array and
/// returns its first expression, plus a top-level `confidence` if any. Text
/// without such an object is taken as a bare expression.
pub fn extract_expression(text: &str) -> (String, Option<f64>) {
    for (i, _) in text.match_indices('{') {
        let mut stream = serde_json::Deserializer::from_str(&text[i..]).into_iter::<Value>();
        if let Some(Ok(v)) = stream.next() {
            if let Some(expr) = v.pointer("/translations/0/expression").and_then(Value::as_str) {
                return (expr.to_string(), v.get("confidence").and_then(Value::as_f64));
            }
        }
    }
    let bare = text.trim();
    let bare = bare.strip_prefix("FOL expression:").unwrap_or(bare).trim();
    (bare.to_string(), None)
}

fn to_sample(raw: ChatSample, v: &Vocabulary) -> TranslationSample {
    let (fol_text, embedded) = extract_expression(&raw.text);
    let llm_confidence = raw.confidence.or(embedded).unwrap_or(NEUTRAL_CONFIDENCE).clamp(0.0, 1.0);
    let parsed = parse_query(&fol_text).and_then(|q| normalize(&q, v));
    let (parsed, error) = match parsed {
        Ok(q) => (Some(q), None),
        Err(e) => (None, Some(e.to_string())),
    };
    TranslationSample { fol_text, llm_confidence, raw_response: raw.text, error, parsed }
}

/// Chooses among already collected samples.
pub fn choose(
    query: &str,
    samples: Vec<TranslationSample>,
    sim: &dyn SimilarityProvider,
) -> Result<TranslationResult, TranslateError> {
    let valid: Vec<usize> = (0..samples.len()).filter(|&i| samples[i].is_valid()).collect();
    if valid.is_empty() {
        return Err(TranslateError::NoValidSample(samples.len()));
    }
    let candidates: Vec<Candidate> = valid
        .iter()
        .map(|&i| Candidate { query: samples[i].parsed.as_ref().expect("valid"), confidence: samples[i].llm_confidence })
        .collect();
    let sel = select_sample(&candidates, query, sim)?;
    let mut similarity_scores = vec![None; samples.len()];
    for (k, &i) in valid.iter().enumerate() {
        similarity_scores[i] = Some(sel.similarities[k]);
    }
    let chosen_index = valid[sel.index];
    Ok(TranslationResult {
        chosen: samples[chosen_index].parsed.clone().expect("valid"),
        chosen_index,
        samples,
        similarity_scores,
        selection_reason: sel.reason,
    })
}

/// Requests `config.samples` completions concurrently, one per request, and
/// selects one with the default similarity.
pub fn translate(
    query: &str,
    client: &dyn ChatClient,
    config: &TranslatorConfig,
    v: &Vocabulary,
) -> Result<TranslationResult, TranslateError> {
    translate_with(query, client, config, v, &JaccardSimilarity)
}

pub fn translate_with(
    query: &str,
    client: &dyn ChatClient,
    config: &TranslatorConfig,
    v: &Vocabulary,
    sim: &dyn SimilarityProvider,
) -> Result<TranslationResult, TranslateError> {
    let request = ChatRequest {
        model: config.model.clone(),
        prompt: build_prompt(query, v).assembled,
        temperature: config.temperature,
        n: 1,
    };
    let n = config.samples.max(1);
    let responses: Vec<Result<Vec<ChatSample>, TranslateError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..n).map(|_| s.spawn(|| client.complete(&request))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(TranslateError::BackendUnavailable("client panicked".into()))))
            .collect()
    });
    let mut samples = Vec::new();
    let mut first_error = None;
    for r in responses {
        match r {
            Ok(batch) => samples.extend(batch.into_iter().take(1).map(|c| to_sample(c, v))),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    if samples.is_empty() {
        return Err(first_error.unwrap_or(TranslateError::BackendUnavailable("no responses".into())));
    }
    choose(query, samples, sim)
}
