//! Planar primitives shared by the simulator, planner and renderer.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle given by its lower-left corner and extent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn max_x(&self) -> f64 {
        self.x + self.w
    }

    pub fn max_y(&self) -> f64 {
        self.y + self.h
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x && p.x <= self.max_x() && p.y >= self.y && p.y <= self.max_y()
    }

    /// Euclidean distance from `p` to the rectangle (zero inside).
    pub fn distance_to(&self, p: Point) -> f64 {
        let dx = (self.x - p.x).max(0.0).max(p.x - self.max_x());
        let dy = (self.y - p.y).max(0.0).max(p.y - self.max_y());
        dx.hypot(dy)
    }

    fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x, self.y),
            Point::new(self.max_x(), self.y),
            Point::new(self.max_x(), self.max_y()),
            Point::new(self.x, self.max_y()),
        ]
    }

    /// Slab test; returns the entry distance along a unit direction.
    pub fn ray_hit(&self, o: Point, dx: f64, dy: f64) -> Option<f64> {
        let mut t0 = f64::NEG_INFINITY;
        let mut t1 = f64::INFINITY;
        for (orig, d, lo, hi) in [(o.x, dx, self.x, self.max_x()), (o.y, dy, self.y, self.max_y())] {
            if d.abs() < 1e-15 {
                if orig < lo || orig > hi {
                    return None;
                }
            } else {
                let a = (lo - orig) / d;
                let b = (hi - orig) / d;
                let (a, b) = if a < b { (a, b) } else { (b, a) };
                t0 = t0.max(a);
                t1 = t1.min(b);
            }
        }
        if t0 > t1 || t1 < 0.0 {
            return None;
        }
        Some(t0.max(0.0))
    }

    pub fn segment_distance(&self, a: Point, b: Point) -> f64 {
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len = dx.hypot(dy);
        if len > 0.0 {
            if let Some(t) = self.ray_hit(a, dx / len, dy / len) {
                if t <= len {
                    return 0.0;
                }
            }
        }
        let mut best = self.distance_to(a).min(self.distance_to(b));
        for c in self.corners() {
            best = best.min(point_segment_distance(c, a, b));
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn distance_to(&self, p: Point) -> f64 {
        (self.center.dist(&p) - self.radius).max(0.0)
    }

    pub fn ray_hit(&self, o: Point, dx: f64, dy: f64) -> Option<f64> {
        let fx = o.x - self.center.x;
        let fy = o.y - self.center.y;
        let b = fx * dx + fy * dy;
        let c = fx * fx + fy * fy - self.radius * self.radius;
        if c <= 0.0 {
            return Some(0.0);
        }
        let disc = b * b - c;
        if disc < 0.0 {
            return None;
        }
        let t = -b - disc.sqrt();
        (t >= 0.0).then_some(t)
    }

    pub fn segment_distance(&self, a: Point, b: Point) -> f64 {
        (point_segment_distance(self.center, a, b) - self.radius).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Rect(Rect),
    Circle(Circle),
}

impl Shape {
    pub fn distance_to(&self, p: Point) -> f64 {
        match self {
            Shape::Rect(r) => r.distance_to(p),
            Shape::Circle(c) => c.distance_to(p),
        }
    }

    pub fn ray_hit(&self, o: Point, dx: f64, dy: f64) -> Option<f64> {
        match self {
            Shape::Rect(r) => r.ray_hit(o, dx, dy),
            Shape::Circle(c) => c.ray_hit(o, dx, dy),
        }
    }

    pub fn segment_distance(&self, a: Point, b: Point) -> f64 {
        match self {
            Shape::Rect(r) => r.segment_distance(a, b),
            Shape::Circle(c) => c.segment_distance(a, b),
        }
    }

    /// Bounding box as (min_x, min_y, max_x, max_y).
    pub fn aabb(&self) -> (f64, f64, f64, f64) {
        match self {
            Shape::Rect(r) => (r.x, r.y, r.max_x(), r.max_y()),
            Shape::Circle(c) => (
                c.center.x - c.radius,
                c.center.y - c.radius,
                c.center.x + c.radius,
                c.center.y + c.radius,
            ),
        }
    }
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.dist(&a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist(&Point::new(a.x + t * dx, a.y + t * dy))
}

/// Wraps an angle into (−π, π].
pub fn normalize_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_range() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(normalize_angle(0.0), 0.0);
    }

    #[test]
    fn rect_ray_from_inside_is_zero() {
        let r = Rect { x: 0.0, y: 0.0, w: 1.0, h: 1.0 };
        assert_eq!(r.ray_hit(Point::new(0.5, 0.5), 1.0, 0.0), Some(0.0));
        assert_eq!(r.ray_hit(Point::new(-1.0, 0.5), 1.0, 0.0), Some(1.0));
        assert_eq!(r.ray_hit(Point::new(-1.0, 0.5), -1.0, 0.0), None);
    }

    #[test]
    fn segment_through_rect_touches() {
        let r = Rect { x: 1.0, y: -1.0, w: 0.1, h: 2.0 };
        assert_eq!(r.segment_distance(Point::new(0.0, 0.0), Point::new(2.0, 0.0)), 0.0);
        let d = r.segment_distance(Point::new(0.0, 2.0), Point::new(2.0, 2.0));
        assert!((d - 1.0).abs() < 1e-12);
    }
}
