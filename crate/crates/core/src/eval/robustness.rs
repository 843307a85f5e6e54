use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::EvalError;
use crate::inference::Scene;
use crate::retrieval::{Corpus, GroundTruth, RankedRun};

pub const LEVELS: [u8; 5] = [1, 2, 3, 4, 5];

/// Mean of `m_i - m_j` over level pairs `i < j` with `j - i = d`. Positive
/// values mean the metric is higher on simpler queries.
pub fn rrqc(metric_by_level: &BTreeMap<u8, f64>, d: u8) -> Result<f64, EvalError> {
    if !(1..=4).contains(&d) {
        return Err(EvalError::InvalidDistance(d));
    }
    for l in LEVELS {
        if !metric_by_level.contains_key(&l) {
            return Err(EvalError::MissingLevel(l));
        }
    }
    let pairs: Vec<f64> = (1..=5 - d).map(|i| metric_by_level[&i] - metric_by_level[&(i + d)]).collect();
    Ok(pairs.iter().sum::<f64>() / pairs.len() as f64)
}

/// Mean difficulty flag over the scene's detections.
pub fn image_uncertainty(scene: &Scene) -> Result<f64, EvalError> {
    if scene.detections.is_empty() {
        return Err(EvalError::NoDetections(scene.image_id.clone()));
    }
    let hard = scene.detections.iter().filter(|d| d.difficulty > 0).count();
    Ok(hard as f64 / scene.detections.len() as f64)
}

/// Images grouped by uncertainty into equal-width bins on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncertaintyBins {
    pub bin_edges: Vec<f64>,
    pub bins: Vec<BTreeSet<String>>,
    /// Mean top-k hit ratio of each image over the cutoffs.
    pub per_image_ratio: BTreeMap<String, f64>,
    pub per_image_uncertainty: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RriuEntry {
    /// 1-based bin numbers, `i < j`.
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RriuReport {
    pub bins: UncertaintyBins,
    /// Mean ratio per bin; `None` for empty bins.
    pub bin_probability: Vec<Option<f64>>,
    /// 1-based numbers of bins without images.
    pub empty_bins: Vec<usize>,
    pub entries: Vec<RriuEntry>,
}

impl RriuReport {
    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.i == i && e.j == j).map(|e| e.value)
    }
}

/// Bin index of an uncertainty value; 1.0 falls into the last bin.
pub fn bin_of(iu: f64, m: usize) -> usize {
    ((iu * m as f64).floor() as usize).min(m - 1)
}

/// For each image relevant to at least one run's query: the fraction of
/// those queries whose top `k` contains it, averaged over `ks`. Images are
/// binned by uncertainty and `RRIU(i, j) = P(B_j) - P(B_i)` for non-empty
/// bins `i < j`.
pub fn rriu(runs: &[RankedRun], gt: &GroundTruth, corpus: &Corpus, m: usize, ks: &[usize]) -> Result<RriuReport, EvalError> {
    if m == 0 {
        return Err(EvalError::InvalidBins);
    }
    if ks.is_empty() || ks.contains(&0) {
        return Err(EvalError::InvalidK);
    }
    let mut n_gt: BTreeMap<String, usize> = BTreeMap::new();
    let mut n_hit: BTreeMap<(String, usize), usize> = BTreeMap::new();
    for run in runs {
        let rel = gt.relevant.get(&run.query_id).ok_or_else(|| EvalError::UnknownQuery(run.query_id.clone()))?;
        for image in rel {
            if corpus.get(image).is_none() {
                return Err(EvalError::ImageMissingFromCorpus(image.clone()));
            }
            *n_gt.entry(image.clone()).or_default() += 1;
            for &k in ks {
                if run.top_k(k).any(|id| id == image) {
                    *n_hit.entry((image.clone(), k)).or_default() += 1;
                }
            }
        }
    }
    let mut per_image_ratio = BTreeMap::new();
    let mut per_image_uncertainty = BTreeMap::new();
    let mut bins = vec![BTreeSet::new(); m];
    for (image, &total) in &n_gt {
        let ratio = ks
            .iter()
            .map(|&k| n_hit.get(&(image.clone(), k)).copied().unwrap_or(0) as f64 / total as f64)
            .sum::<f64>()
            / ks.len() as f64;
        let iu = image_uncertainty(corpus.get(image).expect("checked above"))?;
        per_image_ratio.insert(image.clone(), ratio);
        per_image_uncertainty.insert(image.clone(), iu);
        bins[bin_of(iu, m)].insert(image.clone());
    }
    let bin_probability: Vec<Option<f64>> = bins
        .iter()
        .map(|b| (!b.is_empty()).then(|| b.iter().map(|i| per_image_ratio[i]).sum::<f64>() / b.len() as f64))
        .collect();
    let empty_bins = (0..m).filter(|&b| bin_probability[b].is_none()).map(|b| b + 1).collect();
    let mut entries = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if let (Some(pi), Some(pj)) = (bin_probability[i], bin_probability[j]) {
                entries.push(RriuEntry { i: i + 1, j: j + 1, value: pj - pi });
            }
        }
    }
    let bin_edges = (0..=m).map(|e| e as f64 / m as f64).collect();
    Ok(RriuReport {
        bins: UncertaintyBins { bin_edges, bins, per_image_ratio, per_image_uncertainty },
        bin_probability,
        empty_bins,
        entries,
    })
}
