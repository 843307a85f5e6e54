use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::RetrievalError;

/// One line of a query file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuerySpec {
    pub id: String,
    pub level: u8,
    pub text: String,
}

/// Parses `query_id <TAB> level <TAB> text` lines. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_query_file(text: &str) -> Result<Vec<QuerySpec>, RetrievalError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let err = |message: String| RetrievalError::QueryFile { line: line_no, message };
        let mut parts = line.splitn(3, '\t');
        let (Some(id), Some(level), Some(text)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected three tab-separated fields".into()));
        };
        let level: u8 = level.trim().parse().map_err(|_| err(format!("level `{level}` is not an integer")))?;
        if !(1..=5).contains(&level) {
            return Err(err(format!("level {level} is outside 1..=5")));
        }
        let id = id.trim().to_string();
        if id.is_empty() || !seen.insert(id.clone()) {
            return Err(err(format!("query id `{id}` is empty or repeated")));
        }
        out.push(QuerySpec { id, level, text: text.trim().to_string() });
    }
    Ok(out)
}

/// Relevance judgments and complexity levels per query.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct GroundTruth {
    pub relevant: BTreeMap<String, BTreeSet<String>>,
    pub complexity_level: BTreeMap<String, u8>,
}

impl GroundTruth {
    /// Reads the JSON map `query_id -> [image_id]` and takes levels from the
    /// query specs.
    pub fn from_json_str(text: &str, queries: &[QuerySpec]) -> Result<Self, RetrievalError> {
        let relevant: BTreeMap<String, BTreeSet<String>> = serde_json::from_str(text).map_err(|e| {
            RetrievalError::Schema { locus: format!("ground truth line {} column {}", e.line(), e.column()), message: e.to_string() }
        })?;
        let complexity_level = queries.iter().map(|q| (q.id.clone(), q.level)).collect();
        Ok(GroundTruth { relevant, complexity_level })
    }
}
