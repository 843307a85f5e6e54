use std::collections::BTreeMap;

use serde::Serialize;

use super::EvalError;
use crate::retrieval::{GroundTruth, RankedRun};

pub const DEFAULT_KS: [usize; 3] = [1, 5, 10];

fn relevant<'g>(run: &RankedRun, gt: &'g GroundTruth) -> Result<&'g std::collections::BTreeSet<String>, EvalError> {
    gt.relevant.get(&run.query_id).ok_or_else(|| EvalError::UnknownQuery(run.query_id.clone()))
}

fn hits(run: &RankedRun, gt: &GroundTruth, k: usize) -> Result<usize, EvalError> {
    if k == 0 {
        return Err(EvalError::InvalidK);
    }
    let rel = relevant(run, gt)?;
    Ok(run.top_k(k).filter(|id| rel.contains(*id)).count())
}

/// Relevant items among the top `k`, divided by `k`.
pub fn precision_at_k(run: &RankedRun, gt: &GroundTruth, k: usize) -> Result<f64, EvalError> {
    Ok(hits(run, gt, k)? as f64 / k as f64)
}

/// 1 when any relevant item is in the top `k`, else 0.
pub fn recall_at_k(run: &RankedRun, gt: &GroundTruth, k: usize) -> Result<f64, EvalError> {
    Ok(if hits(run, gt, k)? > 0 { 1.0 } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanMetrics {
    pub m_r: f64,
    pub m_p: f64,
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    sum / n as f64
}

/// Per-`k` averages over `runs` of R@k and P@k.
pub fn per_k_means(runs: &[&RankedRun], gt: &GroundTruth, ks: &[usize]) -> Result<Vec<(usize, f64, f64)>, EvalError> {
    if runs.is_empty() {
        return Err(EvalError::EmptyRunSet);
    }
    ks.iter()
        .map(|&k| {
            let r = runs.iter().map(|run| recall_at_k(run, gt, k)).collect::<Result<Vec<_>, _>>()?;
            let p = runs.iter().map(|run| precision_at_k(run, gt, k)).collect::<Result<Vec<_>, _>>()?;
            Ok((k, mean(r), mean(p)))
        })
        .collect()
}

/// mR and mP: metrics averaged over queries, then over `ks`.
pub fn mean_metrics(runs: &[&RankedRun], gt: &GroundTruth, ks: &[usize]) -> Result<MeanMetrics, EvalError> {
    if ks.is_empty() {
        return Err(EvalError::InvalidK);
    }
    let per_k = per_k_means(runs, gt, ks)?;
    Ok(MeanMetrics { m_r: mean(per_k.iter().map(|t| t.1)), m_p: mean(per_k.iter().map(|t| t.2)) })
}

/// Metrics per complexity level, keyed `R@k`, `P@k`, `mR`, `mP`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricTable {
    pub ks: Vec<usize>,
    pub per_level: BTreeMap<u8, BTreeMap<String, f64>>,
}

impl MetricTable {
    pub fn metric_by_level(&self, name: &str) -> BTreeMap<u8, f64> {
        self.per_level.iter().filter_map(|(l, m)| m.get(name).map(|v| (*l, *v))).collect()
    }
}

fn level_of(run: &RankedRun, gt: &GroundTruth) -> Result<u8, EvalError> {
    gt.complexity_level
        .get(&run.query_id)
        .copied()
        .or(run.level)
        .ok_or_else(|| EvalError::MissingQueryLevel(run.query_id.clone()))
}

pub fn metric_table(runs: &[RankedRun], gt: &GroundTruth, ks: &[usize]) -> Result<MetricTable, EvalError> {
    if runs.is_empty() {
        return Err(EvalError::EmptyRunSet);
    }
    let mut by_level: BTreeMap<u8, Vec<&RankedRun>> = BTreeMap::new();
    for run in runs {
        by_level.entry(level_of(run, gt)?).or_default().push(run);
    }
    let mut per_level = BTreeMap::new();
    for (level, group) in by_level {
        let mut row = BTreeMap::new();
        for (k, r, p) in per_k_means(&group, gt, ks)? {
            row.insert(format!("R@{k}"), r);
            row.insert(format!("P@{k}"), p);
        }
        let m = mean_metrics(&group, gt, ks)?;
        row.insert("mR".into(), m.m_r);
        row.insert("mP".into(), m.m_p);
        per_level.insert(level, row);
    }
    Ok(MetricTable { ks: ks.to_vec(), per_level })
}
