//! Oriented-box geometry and the spatial predicates built on it.

mod clip;
mod gsd;
mod obb;
mod predicates;

use thiserror::Error;

pub use clip::{boundary_gap, clip_convex, inner_margin, iou, polygon_area, polygon_intersection_area};
pub use gsd::{compute_gsd, Gsd, GsdMetadata};
pub use obb::{corners, OrientedBox, Point};
pub use predicates::{
    area_m2, eval_directional, eval_facing, eval_is_close, eval_is_different, eval_metric_predicate,
    eval_rcc, eval_relation, rcc8_relation, Direction, Facing, MetricPredicate, PredicateContext,
    Rcc8, Relation, Tolerances,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("`{field}` must be positive and finite, got {value}")]
    NonPositiveInput { field: &'static str, value: f64 },
    #[error("metric predicate needs ground-sample-distance metadata")]
    MissingGsd,
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate takes {expected} box(es), got {found}")]
    Arity { expected: usize, found: usize },
}
