use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

/// An oriented bounding box in pixel coordinates (y grows downward).
///
/// `theta` is the rotation of the width axis from the image x-axis, kept in
/// `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
    pub theta: f64,
}

pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(TAU) - PI;
    if t >= PI {
        t - TAU
    } else {
        t
    }
}

impl OrientedBox {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64, theta: f64) -> Result<Self, GeometryError> {
        if ![cx, cy, w, h, theta].iter().all(|v| v.is_finite()) {
            return Err(GeometryError::InvalidBox("non-finite field".into()));
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(GeometryError::InvalidBox(format!("size must be positive, got {w}x{h}")));
        }
        Ok(OrientedBox { cx, cy, w, h, theta: wrap_angle(theta) })
    }

    /// Axis-aligned box, for tests and fixtures.
    pub fn axis_aligned(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        OrientedBox { cx, cy, w, h, theta: 0.0 }
    }

    pub fn center(&self) -> Point {
        Point::new(self.cx, self.cy)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn diagonal(&self) -> f64 {
        self.w.hypot(self.h)
    }

    /// Unit vector along the width axis.
    pub fn heading(&self) -> Point {
        Point::new(self.theta.cos(), self.theta.sin())
    }

    /// Corners in counter-clockwise order (positive shoelace area).
    pub fn corners(&self) -> [Point; 4] {
        let (s, c) = self.theta.sin_cos();
        let (hw, hh) = (self.w / 2.0, self.h / 2.0);
        let at = |dx: f64, dy: f64| Point::new(self.cx + dx * c - dy * s, self.cy + dx * s + dy * c);
        [at(-hw, -hh), at(hw, -hh), at(hw, hh), at(-hw, hh)]
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        OrientedBox { cx: self.cx + dx, cy: self.cy + dy, ..*self }
    }
}

/// See [`OrientedBox::corners`].
pub fn corners(b: &OrientedBox) -> [Point; 4] {
    b.corners()
}
