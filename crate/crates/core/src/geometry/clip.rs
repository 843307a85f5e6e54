//! Convex polygon clipping and distances between box boundaries.

use super::obb::{OrientedBox, Point};

/// Signed shoelace area; positive for counter-clockwise vertex order.
pub fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        s += p.cross(q);
    }
    s / 2.0
}

/// Sutherland–Hodgman: clips `subject` against the convex, counter-clockwise
/// polygon `clip`.
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut output: Vec<Point> = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let (e0, e1) = (clip[i], clip[(i + 1) % clip.len()]);
        let edge = e1 - e0;
        let side = |p: Point| edge.cross(p - e0);
        let input = std::mem::take(&mut output);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let (sc, sp) = (side(cur), side(prev));
            if sc >= 0.0 {
                if sp < 0.0 {
                    output.push(intersect(prev, cur, sp, sc));
                }
                output.push(cur);
            } else if sp >= 0.0 {
                output.push(intersect(prev, cur, sp, sc));
            }
        }
    }
    output
}

fn intersect(p: Point, q: Point, sp: f64, sq: f64) -> Point {
    let t = sp / (sp - sq);
    Point::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))
}

/// Area of `a ∩ b` in px².
pub fn polygon_intersection_area(a: &OrientedBox, b: &OrientedBox) -> f64 {
    let clipped = clip_convex(&b.corners(), &a.corners());
    polygon_area(&clipped).max(0.0).min(a.area().min(b.area()))
}

pub fn iou(a: &OrientedBox, b: &OrientedBox) -> f64 {
    let inter = polygon_intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(Point::new(a.x + t * ab.x, a.y + t * ab.y))
}

fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = (q2 - q1).cross(p1 - q1);
    let d2 = (q2 - q1).cross(p2 - q1);
    let d3 = (p2 - p1).cross(q1 - p1);
    let d4 = (p2 - p1).cross(q2 - p1);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

fn segment_distance(p1: Point, p2: Point, q1: Point, q2: Point) -> f64 {
    if segments_cross(p1, p2, q1, q2) {
        return 0.0;
    }
    point_segment_distance(p1, q1, q2)
        .min(point_segment_distance(p2, q1, q2))
        .min(point_segment_distance(q1, p1, p2))
        .min(point_segment_distance(q2, p1, p2))
}

/// Smallest distance between the two boundaries; 0 when they touch or cross.
pub fn boundary_gap(a: &OrientedBox, b: &OrientedBox) -> f64 {
    let (ca, cb) = (a.corners(), b.corners());
    let mut best = f64::INFINITY;
    for i in 0..4 {
        for j in 0..4 {
            best = best.min(segment_distance(ca[i], ca[(i + 1) % 4], cb[j], cb[(j + 1) % 4]));
        }
    }
    best
}

/// Signed distance of `p` to the boundary of the convex CCW polygon:
/// positive inside, negative outside.
fn signed_inside_distance(p: Point, poly: &[Point]) -> f64 {
    let mut inside = true;
    let mut dmin = f64::INFINITY;
    for i in 0..poly.len() {
        let (e0, e1) = (poly[i], poly[(i + 1) % poly.len()]);
        if (e1 - e0).cross(p - e0) < 0.0 {
            inside = false;
        }
        dmin = dmin.min(point_segment_distance(p, e0, e1));
    }
    if inside {
        dmin
    } else {
        -dmin
    }
}

/// How far `inner`'s boundary stays inside `outer`'s boundary. Because both
/// boxes are convex the minimum is attained at a corner of `inner`. Negative
/// when a corner pokes out.
pub fn inner_margin(inner: &OrientedBox, outer: &OrientedBox) -> f64 {
    let poly = outer.corners();
    inner
        .corners()
        .iter()
        .map(|&p| signed_inside_distance(p, &poly))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_boxes_overlap_fully() {
        let b = OrientedBox::new(5.0, 5.0, 3.0, 2.0, 0.3).unwrap();
        assert!((polygon_intersection_area(&b, &b) - 6.0).abs() < 1e-9);
    }

    #[test]
    fn disjoint_boxes_do_not_overlap() {
        let a = OrientedBox::axis_aligned(0.0, 0.0, 1.0, 1.0);
        let b = OrientedBox::axis_aligned(10.0, 0.0, 1.0, 1.0);
        assert_eq!(polygon_intersection_area(&a, &b), 0.0);
        assert!((boundary_gap(&a, &b) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn half_offset_unit_squares() {
        // analytic: overlap is a 0.5 x 1 rectangle
        let a = OrientedBox::axis_aligned(0.0, 0.0, 1.0, 1.0);
        let b = OrientedBox::axis_aligned(0.5, 0.0, 1.0, 1.0);
        assert!((polygon_intersection_area(&a, &b) - 0.5).abs() < 1e-12);
        assert!((iou(&a, &b) - 0.5 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn rotated_square_in_square() {
        // a unit square rotated 45 degrees inside a 2x2 square
        let outer = OrientedBox::axis_aligned(0.0, 0.0, 2.0, 2.0);
        let inner = OrientedBox::new(0.0, 0.0, 1.0, 1.0, std::f64::consts::FRAC_PI_4).unwrap();
        assert!((polygon_intersection_area(&outer, &inner) - 1.0).abs() < 1e-12);
        let margin = inner_margin(&inner, &outer);
        assert!((margin - (1.0 - 2f64.sqrt() / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn shared_edge_has_zero_gap() {
        let a = OrientedBox::axis_aligned(0.0, 0.0, 1.0, 1.0);
        let b = OrientedBox::axis_aligned(1.0, 0.0, 1.0, 1.0);
        assert_eq!(boundary_gap(&a, &b), 0.0);
        assert!(polygon_intersection_area(&a, &b).abs() < 1e-12);
    }
}
