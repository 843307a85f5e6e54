use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use super::EvalError;
use crate::fol::ConjunctiveQuery;
use crate::geometry::PredicateContext;
use crate::inference::{hypothesis_count, naive_score, score_query};
use crate::retrieval::Corpus;

/// A query to benchmark, with its complexity level.
#[derive(Debug, Clone)]
pub struct BenchQuery {
    pub id: String,
    pub level: u8,
    pub query: ConjunctiveQuery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NaiveStatus {
    Ok,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchCase {
    pub query_id: String,
    pub image_id: String,
    pub level: u8,
    pub factorized_count: u128,
    pub naive_count: u128,
    pub factorized_ms: f64,
    pub naive_ms: Option<f64>,
    pub naive_status: NaiveStatus,
    pub probability: f64,
    pub naive_probability: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeStats {
    pub min_ms: f64,
    pub avg_ms: f64,
    pub max_ms: f64,
}

impl TimeStats {
    fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        Some(TimeStats {
            min_ms: xs.iter().copied().fold(f64::INFINITY, f64::min),
            avg_ms: xs.iter().sum::<f64>() / xs.len() as f64,
            max_ms: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRow {
    pub level: u8,
    pub cases: usize,
    pub factorized: TimeStats,
    /// `None` when every naive case was skipped.
    pub naive: Option<TimeStats>,
    pub naive_skipped: usize,
    pub max_factorized_count: u128,
    pub max_naive_count: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub floor: f64,
    pub budget: u128,
    pub rows: Vec<LevelRow>,
    pub cases: Vec<BenchCase>,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Times factorized and naive scoring of every query on every scene. Naive
/// scoring runs only when `N^M` is within `budget`.
pub fn bench_compare(
    corpus: &Corpus,
    queries: &[BenchQuery],
    ctx: &PredicateContext,
    floor: f64,
    budget: u128,
) -> Result<BenchReport, EvalError> {
    let mut cases = Vec::new();
    for bq in queries {
        for scene in corpus.scenes() {
            let counts = hypothesis_count(&bq.query, scene, floor);
            let start = Instant::now();
            let scored = score_query(&bq.query, scene, ctx, floor)?;
            let factorized_ms = elapsed_ms(start);
            let (naive_ms, naive_probability, naive_status) = if counts.naive <= budget {
                let start = Instant::now();
                let p = naive_score(&bq.query, scene, ctx, floor, budget)?;
                (Some(elapsed_ms(start)), Some(p), NaiveStatus::Ok)
            } else {
                (None, None, NaiveStatus::Skipped)
            };
            cases.push(BenchCase {
                query_id: bq.id.clone(),
                image_id: scene.image_id.clone(),
                level: bq.level,
                factorized_count: counts.factorized,
                naive_count: counts.naive,
                factorized_ms,
                naive_ms,
                naive_status,
                probability: scored.probability,
                naive_probability,
            });
        }
    }
    let mut by_level: BTreeMap<u8, Vec<&BenchCase>> = BTreeMap::new();
    for c in &cases {
        by_level.entry(c.level).or_default().push(c);
    }
    let rows = by_level
        .into_iter()
        .filter_map(|(level, cs)| {
            let fact: Vec<f64> = cs.iter().map(|c| c.factorized_ms).collect();
            let naive: Vec<f64> = cs.iter().filter_map(|c| c.naive_ms).collect();
            Some(LevelRow {
                level,
                cases: cs.len(),
                factorized: TimeStats::of(&fact)?,
                naive: TimeStats::of(&naive),
                naive_skipped: cs.iter().filter(|c| c.naive_status == NaiveStatus::Skipped).count(),
                max_factorized_count: cs.iter().map(|c| c.factorized_count).max().unwrap_or(0),
                max_naive_count: cs.iter().map(|c| c.naive_count).max().unwrap_or(0),
            })
        })
        .collect();
    Ok(BenchReport { floor, budget, rows, cases })
}
