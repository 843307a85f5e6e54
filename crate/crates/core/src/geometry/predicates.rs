//! Spatial predicate evaluators over pairs of oriented boxes.
//!
//! Directional, topological and GSD-based predicates are crisp (0 or 1);
//! `is_close` and the facing predicates are soft scores in `[0, 1]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::clip::{boundary_gap, inner_margin, polygon_intersection_area};
use super::gsd::{compute_gsd, Gsd, GsdMetadata};
use super::obb::OrientedBox;
use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rcc8 {
    DC,
    EC,
    PO,
    TPP,
    NTPP,
    EQ,
    TPPI,
    NTPPI,
}

impl Rcc8 {
    pub const ALL: [Rcc8; 8] =
        [Rcc8::DC, Rcc8::EC, Rcc8::PO, Rcc8::TPP, Rcc8::NTPP, Rcc8::EQ, Rcc8::TPPI, Rcc8::NTPPI];

    pub fn name(self) -> &'static str {
        match self {
            Rcc8::DC => "DC",
            Rcc8::EC => "EC",
            Rcc8::PO => "PO",
            Rcc8::TPP => "TPP",
            Rcc8::NTPP => "NTPP",
            Rcc8::EQ => "EQ",
            Rcc8::TPPI => "TPPI",
            Rcc8::NTPPI => "NTPPI",
        }
    }

    pub fn converse(self) -> Rcc8 {
        match self {
            Rcc8::TPP => Rcc8::TPPI,
            Rcc8::NTPP => Rcc8::NTPPI,
            Rcc8::TPPI => Rcc8::TPP,
            Rcc8::NTPPI => Rcc8::NTPP,
            r => r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    LeftOf,
    RightOf,
    IsAbove,
    IsBelow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Facing {
    Same,
    Opposite,
}

/// An atomic binary relation, resolved from its canonical name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Directional(Direction),
    IsClose,
    Facing(Facing),
    Topological(Rcc8),
    IsDifferent,
}

impl Relation {
    pub fn name(self) -> &'static str {
        match self {
            Relation::Directional(Direction::LeftOf) => "left_of",
            Relation::Directional(Direction::RightOf) => "right_of",
            Relation::Directional(Direction::IsAbove) => "is_above",
            Relation::Directional(Direction::IsBelow) => "is_below",
            Relation::IsClose => "is_close",
            Relation::Facing(Facing::Same) => "facing_same",
            Relation::Facing(Facing::Opposite) => "facing_opposite",
            Relation::Topological(r) => r.name(),
            Relation::IsDifferent => "is_different",
        }
    }
}

impl FromStr for Relation {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "left_of" => Relation::Directional(Direction::LeftOf),
            "right_of" => Relation::Directional(Direction::RightOf),
            "is_above" => Relation::Directional(Direction::IsAbove),
            "is_below" => Relation::Directional(Direction::IsBelow),
            "is_close" => Relation::IsClose,
            "facing_same" => Relation::Facing(Facing::Same),
            "facing_opposite" => Relation::Facing(Facing::Opposite),
            "is_different" => Relation::IsDifferent,
            other => match Rcc8::ALL.iter().find(|r| r.name() == other) {
                Some(r) => Relation::Topological(*r),
                None => return Err(GeometryError::UnknownPredicate(other.to_string())),
            },
        })
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricPredicate {
    IsCloseMeters,
    IsSquareMeters,
}

impl FromStr for MetricPredicate {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "is_close_meters" => Ok(MetricPredicate::IsCloseMeters),
            "is_square_meters" => Ok(MetricPredicate::IsSquareMeters),
            other => Err(GeometryError::UnknownPredicate(other.to_string())),
        }
    }
}

impl MetricPredicate {
    pub fn arity(self) -> usize {
        match self {
            MetricPredicate::IsCloseMeters => 2,
            MetricPredicate::IsSquareMeters => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Boundary distance (px) below which two boxes count as touching.
    pub eps_boundary_px: f64,
    /// IoU at or above which two boxes are the same region.
    pub eq_iou: f64,
    /// Fraction of a box's area that must lie inside another for proper-part.
    pub containment_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eps_boundary_px: 2.0, eq_iou: 0.95, containment_ratio: 0.95 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PredicateContext {
    pub tolerances: Tolerances,
    pub gsd: Option<GsdMetadata>,
}

impl PredicateContext {
    pub fn new(tolerances: Tolerances, gsd: Option<GsdMetadata>) -> Result<Self, GeometryError> {
        let t = &tolerances;
        if !(t.eps_boundary_px.is_finite() && t.eps_boundary_px > 0.0) {
            return Err(GeometryError::InvalidTolerance("eps_boundary_px must be positive".into()));
        }
        for (name, v) in [("eq_iou", t.eq_iou), ("containment_ratio", t.containment_ratio)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(GeometryError::InvalidTolerance(format!("{name} must lie in (0, 1]")));
            }
        }
        if let Some(m) = &gsd {
            compute_gsd(m)?;
        }
        Ok(PredicateContext { tolerances, gsd })
    }

    pub fn with_gsd(mut self, gsd: Option<GsdMetadata>) -> Self {
        self.gsd = gsd;
        self
    }

    pub fn resolved_gsd(&self) -> Result<Gsd, GeometryError> {
        match &self.gsd {
            Some(m) => compute_gsd(m),
            None => Err(GeometryError::MissingGsd),
        }
    }
}

fn crisp(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Compares centers; ties are false in both directions.
pub fn eval_directional(rel: Direction, a: &OrientedBox, b: &OrientedBox) -> f64 {
    crisp(match rel {
        Direction::LeftOf => a.cx < b.cx,
        Direction::RightOf => a.cx > b.cx,
        Direction::IsAbove => a.cy < b.cy,
        Direction::IsBelow => a.cy > b.cy,
    })
}

/// `1 / (1 + d / s)` with `d` the center distance and `s` the mean diagonal.
pub fn eval_is_close(a: &OrientedBox, b: &OrientedBox) -> f64 {
    let d = a.center().dist(b.center());
    let s = (a.diagonal() + b.diagonal()) / 2.0;
    1.0 / (1.0 + d / s)
}

/// Cosine of the heading difference, clipped at zero.
pub fn eval_facing(rel: Facing, a: &OrientedBox, b: &OrientedBox) -> f64 {
    let cos = a.heading().dot(b.heading()).clamp(-1.0, 1.0);
    match rel {
        Facing::Same => cos.max(0.0),
        Facing::Opposite => (-cos).max(0.0),
    }
}

/// The single RCC-8 relation holding for the ordered pair `(a, b)`.
pub fn rcc8_relation(a: &OrientedBox, b: &OrientedBox, tol: &Tolerances) -> Rcc8 {
    let (area_a, area_b) = (a.area(), b.area());
    let inter = polygon_intersection_area(a, b);
    if inter <= 1e-9 * area_a.min(area_b) {
        return if boundary_gap(a, b) <= tol.eps_boundary_px { Rcc8::EC } else { Rcc8::DC };
    }
    let iou = inter / (area_a + area_b - inter);
    if iou >= tol.eq_iou {
        return Rcc8::EQ;
    }
    let mut a_in_b = inter / area_a >= tol.containment_ratio;
    let mut b_in_a = inter / area_b >= tol.containment_ratio;
    if a_in_b && b_in_a {
        // near-equal boxes that miss the EQ threshold: the smaller is the part
        if area_a < area_b {
            b_in_a = false;
        } else if area_b < area_a {
            a_in_b = false;
        } else {
            return Rcc8::PO;
        }
    }
    if a_in_b {
        if inner_margin(a, b) > tol.eps_boundary_px {
            Rcc8::NTPP
        } else {
            Rcc8::TPP
        }
    } else if b_in_a {
        if inner_margin(b, a) > tol.eps_boundary_px {
            Rcc8::NTPPI
        } else {
            Rcc8::TPPI
        }
    } else {
        Rcc8::PO
    }
}

pub fn eval_rcc(rel: Rcc8, a: &OrientedBox, b: &OrientedBox, ctx: &PredicateContext) -> f64 {
    crisp(rcc8_relation(a, b, &ctx.tolerances) == rel)
}

pub fn eval_is_different(a_index: usize, b_index: usize) -> f64 {
    crisp(a_index != b_index)
}

/// Evaluates a binary relation on two indexed boxes.
pub fn eval_relation(
    rel: Relation,
    (ia, a): (usize, &OrientedBox),
    (ib, b): (usize, &OrientedBox),
    ctx: &PredicateContext,
) -> f64 {
    match rel {
        Relation::Directional(d) => eval_directional(d, a, b),
        Relation::IsClose => eval_is_close(a, b),
        Relation::Facing(f) => eval_facing(f, a, b),
        Relation::Topological(r) => eval_rcc(r, a, b, ctx),
        Relation::IsDifferent => eval_is_different(ia, ib),
    }
}

/// Box area in square meters, width scaled by `gsd.w` and height by `gsd.h`.
pub fn area_m2(b: &OrientedBox, gsd: &Gsd) -> f64 {
    b.w * gsd.w * b.h * gsd.h
}

/// `is_close_meters(a, b, t)`: center distance in meters is at most `t`.
/// `is_square_meters(a, t)`: area in square meters is at least `t`.
pub fn eval_metric_predicate(
    pred: MetricPredicate,
    boxes: &[&OrientedBox],
    threshold: f64,
    ctx: &PredicateContext,
) -> Result<f64, GeometryError> {
    let gsd = ctx.resolved_gsd()?;
    if boxes.len() != pred.arity() {
        return Err(GeometryError::Arity { expected: pred.arity(), found: boxes.len() });
    }
    Ok(match pred {
        MetricPredicate::IsCloseMeters => {
            let d = boxes[0].center().dist(boxes[1].center()) * gsd.mean();
            crisp(d <= threshold)
        }
        MetricPredicate::IsSquareMeters => crisp(area_m2(boxes[0], &gsd) >= threshold),
    })
}
