use std::time::Duration;

use serde_json::{json, Value};

use super::offline::offline_translate;
use super::prompt::REQUEST_PREFIX;
use super::TranslateError;
use crate::vocab::Vocabulary;

/// A single-turn completion request.
#[derive(Debug, Clone, PartialEq)]
pub struct ChatRequest {
    pub model: String,
    pub prompt: String,
    pub temperature: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatSample {
    pub text: String,
    pub confidence: Option<f64>,
}

pub trait ChatClient: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<Vec<ChatSample>, TranslateError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslatorConfig {
    /// Chat-completions URL.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: String,
    pub samples: usize,
    pub temperature: f64,
    pub timeout: Duration,
}

impl Default for TranslatorConfig {
    fn default() -> Self {
        TranslatorConfig {
            endpoint: "http://localhost:8000/v1/chat/completions".into(),
            model: "gpt-4o".into(),
            api_key_env: "RSFOL_API_KEY".into(),
            samples: 10,
            temperature: 0.7,
            timeout: Duration::from_secs(30),
        }
    }
}

/// Client for OpenAI-style chat-completion endpoints.
pub struct HttpChatClient {
    endpoint: String,
    api_key: Option<String>,
    agent: ureq::Agent,
}

impl HttpChatClient {
    pub fn new(config: &TranslatorConfig) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(config.timeout)).build().into();
        HttpChatClient {
            endpoint: config.endpoint.clone(),
            api_key: std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty()),
            agent,
        }
    }
}

impl ChatClient for HttpChatClient {
    fn complete(&self, request: &ChatRequest) -> Result<Vec<ChatSample>, TranslateError> {
        let body = json!({
            "model": request.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "n": request.n,
            "logprobs": true,
        });
        let mut req = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let unavailable = |e: ureq::Error| TranslateError::BackendUnavailable(e.to_string());
        let mut resp = req.send_json(&body).map_err(unavailable)?;
        let value: Value = resp.body_mut().read_json().map_err(unavailable)?;
        parse_chat_response(&value)
    }
}

/// Reads `choices[].message.content`. A numeric `confidence` on the choice is
/// used as is; otherwise token log-probabilities, when present, give
/// `exp(mean logprob)`.
pub fn parse_chat_response(value: &Value) -> Result<Vec<ChatSample>, TranslateError> {
    let choices = value
        .get("choices")
        .and_then(Value::as_array)
        .ok_or_else(|| TranslateError::BackendUnavailable("response has no `choices` array".into()))?;
    Ok(choices
        .iter()
        .filter_map(|c| {
            let text = c.pointer("/message/content").and_then(Value::as_str)?.to_string();
            let confidence = c.get("confidence").and_then(Value::as_f64).or_else(|| {
                let lps: Vec<f64> = c
                    .pointer("/logprobs/content")?
                    .as_array()?
                    .iter()
                    .filter_map(|t| t.get("logprob").and_then(Value::as_f64))
                    .collect();
                (!lps.is_empty()).then(|| (lps.iter().sum::<f64>() / lps.len() as f64).exp())
            });
            Some(ChatSample { text, confidence: confidence.map(|c| c.clamp(0.0, 1.0)) })
        })
        .collect())
}

/// Answers prompts with the pattern translator, formatted like a model
/// response.
pub struct OfflineClient {
    vocab: Vocabulary,
}

impl OfflineClient {
    pub fn new(vocab: Vocabulary) -> Self {
        OfflineClient { vocab }
    }
}

impl ChatClient for OfflineClient {
    fn complete(&self, request: &ChatRequest) -> Result<Vec<ChatSample>, TranslateError> {
        let query = request.prompt.rsplit(REQUEST_PREFIX).next().unwrap_or(&request.prompt).trim();
        let q = offline_translate(query, &self.vocab)?;
        let variables: serde_json::Map<String, Value> = q
            .variables()
            .iter()
            .map(|v| (v.as_str().to_string(), Value::from(q.class_of(v).unwrap_or_default())))
            .collect();
        let text = json!({
            "variables": variables,
            "translations": [{"query": query, "expression": q.render()}],
        })
        .to_string();
        Ok(vec![ChatSample { text, confidence: None }; request.n.max(1)])
    }
}
