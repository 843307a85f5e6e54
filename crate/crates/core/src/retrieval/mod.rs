//! Corpus loading, ranking, explanations and the flooded-area estimate.

mod corpus;
mod explain;
mod flood;
mod io;
mod rank;

use thiserror::Error;

use crate::inference::InferenceError;

pub use corpus::{load_corpus, Corpus};
pub use explain::{explain, Binding, Explanation};
pub use flood::flooded_area_m2;
pub use io::{parse_query_file, GroundTruth, QuerySpec};
pub use rank::{retrieve, RankedEntry, RankedRun, RetrieveOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RetrievalError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("schema error at {locus}: {message}")]
    Schema { locus: String, message: String },
    #[error("duplicate image id `{0}`")]
    DuplicateImageId(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("image `{0}` is not in the run")]
    UnknownImage(String),
    #[error("scene `{0}` has no ground-sample-distance metadata")]
    MissingGsd(String),
    #[error("query file line {line}: {message}")]
    QueryFile { line: usize, message: String },
    #[error("scoring image `{image_id}`: {source}")]
    Inference { image_id: String, source: InferenceError },
}
