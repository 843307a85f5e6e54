//! Retrieval metrics, robustness measures and the scoring benchmark.

mod bench;
mod metrics;
mod report;
mod robustness;

use thiserror::Error;

use crate::inference::InferenceError;

pub use bench::{bench_compare, BenchCase, BenchQuery, BenchReport, LevelRow, NaiveStatus, TimeStats};
pub use metrics::{mean_metrics, metric_table, per_k_means, precision_at_k, recall_at_k, MeanMetrics, MetricTable, DEFAULT_KS};
pub use report::{evaluate, Direction, EvalReport, RrqcValue};
pub use robustness::{bin_of, image_uncertainty, rriu, rrqc, RriuEntry, RriuReport, UncertaintyBins, LEVELS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("query `{0}` has no ground truth")]
    UnknownQuery(String),
    #[error("cutoffs must be at least 1")]
    InvalidK,
    #[error("no runs to evaluate")]
    EmptyRunSet,
    #[error("no metric value for complexity level {0}")]
    MissingLevel(u8),
    #[error("query `{0}` has no complexity level")]
    MissingQueryLevel(String),
    #[error("level distance must be 1..=4, got {0}")]
    InvalidDistance(u8),
    #[error("image `{0}` has no detections")]
    NoDetections(String),
    #[error("ground-truth image `{0}` is not in the corpus")]
    ImageMissingFromCorpus(String),
    #[error("bin count must be at least 1")]
    InvalidBins,
    #[error(transparent)]
    Inference(#[from] InferenceError),
}
