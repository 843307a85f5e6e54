use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use super::metrics::{metric_table, MetricTable};
use super::robustness::{rriu, rrqc, RriuReport, LEVELS};
use super::EvalError;
use crate::retrieval::{Corpus, GroundTruth, RankedRun};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// The metric is higher on simpler queries.
    DegradesWithComplexity,
    ImprovesWithComplexity,
    Flat,
}

impl Direction {
    fn of(v: f64) -> Self {
        if v > 1e-12 {
            Direction::DegradesWithComplexity
        } else if v < -1e-12 {
            Direction::ImprovesWithComplexity
        } else {
            Direction::Flat
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RrqcValue {
    pub metric: String,
    pub d: u8,
    pub value: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub table: MetricTable,
    /// Empty when some level has no queries; see `rrqc_missing_levels`.
    pub rrqc: Vec<RrqcValue>,
    pub rrqc_missing_levels: Vec<u8>,
    /// Image counts per uncertainty bin.
    pub iu_histogram: Vec<usize>,
    pub rriu: RriuReport,
}

pub fn evaluate(runs: &[RankedRun], gt: &GroundTruth, corpus: &Corpus, ks: &[usize], bins: usize) -> Result<EvalReport, EvalError> {
    let table = metric_table(runs, gt, ks)?;
    let missing: Vec<u8> = LEVELS.iter().copied().filter(|l| !table.per_level.contains_key(l)).collect();
    let mut rrqc_values = Vec::new();
    if missing.is_empty() {
        for metric in ["mR", "mP"] {
            let by_level: BTreeMap<u8, f64> = table.metric_by_level(metric);
            for d in 1..=4 {
                let value = rrqc(&by_level, d)?;
                rrqc_values.push(RrqcValue { metric: metric.into(), d, value, direction: Direction::of(value) });
            }
        }
    }
    let rriu = rriu(runs, gt, corpus, bins, ks)?;
    Ok(EvalReport {
        iu_histogram: rriu.bins.bins.iter().map(|b| b.len()).collect(),
        table,
        rrqc: rrqc_values,
        rrqc_missing_levels: missing,
        rriu,
    })
}

impl EvalReport {
    /// One `level,metric,value` line per table cell, then `rrqc` and `rriu` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,key,metric,value\n");
        for (level, row) in &self.table.per_level {
            for (metric, v) in row {
                let _ = writeln!(out, "table,level{level},{metric},{v}");
            }
        }
        for r in &self.rrqc {
            let _ = writeln!(out, "rrqc,d{},{},{}", r.d, r.metric, r.value);
        }
        for e in &self.rriu.entries {
            let _ = writeln!(out, "rriu,B{}-B{},rriu,{}", e.i, e.j, e.value);
        }
        out
    }
}
