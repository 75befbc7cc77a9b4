//! Static worlds and the line-oriented world file format.
//!
//! ```text
//! # comment
//! name senv1
//! bounds 10 10
//! rect 2 3 1.5 0.4
//! circle 6 6 0.5
//! ```

use super::geometry::{Circle, Point, Rect, Shape};
use super::SimError;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub name: String,
    /// Room extent; the room spans `[0, width] × [0, height]`.
    pub width: f64,
    pub height: f64,
    pub obstacles: Vec<Shape>,
}

impl World {
    pub fn new(name: impl Into<String>, width: f64, height: f64, obstacles: Vec<Shape>) -> Result<Self, SimError> {
        let world = Self { name: name.into(), width, height, obstacles };
        world.validate()?;
        Ok(world)
    }

    pub fn empty(name: impl Into<String>, width: f64, height: f64) -> Result<Self, SimError> {
        Self::new(name, width, height, Vec::new())
    }

    pub fn bounds(&self) -> Rect {
        Rect { x: 0.0, y: 0.0, w: self.width, h: self.height }
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.width.is_finite() && self.height.is_finite() && self.width > 0.0 && self.height > 0.0) {
            return Err(SimError::InvalidWorld(format!(
                "bounds must be positive, got {} x {}",
                self.width, self.height
            )));
        }
        for (i, s) in self.obstacles.iter().enumerate() {
            let (x0, y0, x1, y1) = s.aabb();
            let finite = [x0, y0, x1, y1].iter().all(|v| v.is_finite());
            let positive = match s {
                Shape::Rect(r) => r.w > 0.0 && r.h > 0.0,
                Shape::Circle(c) => c.radius > 0.0,
            };
            if !finite || !positive {
                return Err(SimError::InvalidWorld(format!("obstacle {i} is degenerate")));
            }
            if x1 < 0.0 || y1 < 0.0 || x0 > self.width || y0 > self.height {
                return Err(SimError::InvalidWorld(format!("obstacle {i} lies outside the bounds")));
            }
        }
        Ok(())
    }

    pub fn inside_bounds(&self, p: Point) -> bool {
        p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.height
    }

    /// Distance from `p` to the nearest obstacle surface or wall.
    pub fn clearance(&self, p: Point) -> f64 {
        let wall = p.x.min(p.y).min(self.width - p.x).min(self.height - p.y);
        self.obstacles
            .iter()
            .map(|s| s.distance_to(p))
            .fold(wall, f64::min)
    }

    /// Whether a disk of `radius` at `p` touches an obstacle or leaves the room.
    pub fn disk_collides(&self, p: Point, radius: f64) -> bool {
        if p.x - radius < 0.0 || p.y - radius < 0.0 || p.x + radius > self.width || p.y + radius > self.height {
            return true;
        }
        self.obstacles.iter().any(|s| s.distance_to(p) < radius)
    }

    /// Disk swept along the segment `a → b`.
    pub fn capsule_collides(&self, a: Point, b: Point, radius: f64) -> bool {
        if self.disk_collides(a, radius) || self.disk_collides(b, radius) {
            return true;
        }
        self.obstacles.iter().any(|s| s.segment_distance(a, b) < radius)
    }

    pub fn parse(text: &str) -> Result<Self, SimError> {
        let mut name = None;
        let mut bounds = None;
        let mut obstacles = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let keyword = parts.next().unwrap_or_default();
            let rest: Vec<&str> = parts.collect();
            let err = |message: String| SimError::Parse { line: line_no, message };
            let nums = |n: usize| -> Result<Vec<f64>, SimError> {
                if rest.len() != n {
                    return Err(err(format!("`{keyword}` expects {n} numbers, found {}", rest.len())));
                }
                rest.iter()
                    .map(|t| match t.parse::<f64>() {
                        Ok(v) if v.is_finite() => Ok(v),
                        _ => Err(err(format!("invalid number `{t}`"))),
                    })
                    .collect()
            };
            match keyword {
                "name" => {
                    if rest.len() != 1 {
                        return Err(err("`name` expects a single identifier".into()));
                    }
                    name = Some(rest[0].to_string());
                }
                "bounds" => {
                    if bounds.is_some() {
                        return Err(err("duplicate `bounds` line".into()));
                    }
                    let v = nums(2)?;
                    if v[0] <= 0.0 || v[1] <= 0.0 {
                        return Err(err("bounds must be strictly positive".into()));
                    }
                    bounds = Some((v[0], v[1]));
                }
                "rect" => {
                    let v = nums(4)?;
                    if v[2] <= 0.0 || v[3] <= 0.0 {
                        return Err(err("rect width and height must be positive".into()));
                    }
                    obstacles.push((line_no, Shape::Rect(Rect { x: v[0], y: v[1], w: v[2], h: v[3] })));
                }
                "circle" => {
                    let v = nums(3)?;
                    if v[2] <= 0.0 {
                        return Err(err("circle radius must be positive".into()));
                    }
                    obstacles.push((
                        line_no,
                        Shape::Circle(Circle { center: Point::new(v[0], v[1]), radius: v[2] }),
                    ));
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        let (width, height) = bounds.ok_or(SimError::Parse { line: 0, message: "missing `bounds` line".into() })?;
        for (line, s) in &obstacles {
            let (x0, y0, x1, y1) = s.aabb();
            if x1 < 0.0 || y1 < 0.0 || x0 > width || y0 > height {
                return Err(SimError::Parse { line: *line, message: "obstacle lies outside the bounds".into() });
            }
        }
        Self::new(
            name.unwrap_or_else(|| "world".to_string()),
            width,
            height,
            obstacles.into_iter().map(|(_, s)| s).collect(),
        )
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "name {}", self.name);
        let _ = writeln!(out, "bounds {} {}", self.width, self.height);
        for s in &self.obstacles {
            let _ = match s {
                Shape::Rect(r) => writeln!(out, "rect {} {} {} {}", r.x, r.y, r.w, r.h),
                Shape::Circle(c) => writeln!(out, "circle {} {} {}", c.center.x, c.center.y, c.radius),
            };
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_directives() {
        let w = World::parse("# room\nname lab\nbounds 10 8\nrect 1 1 2 0.5\n\ncircle 5 5 0.3 # post\n").unwrap();
        assert_eq!(w.name, "lab");
        assert_eq!((w.width, w.height), (10.0, 8.0));
        assert_eq!(w.obstacles.len(), 2);
        assert_eq!(World::parse(&w.to_text()).unwrap(), w);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("bounds 4 4\nrect 1 1 1\n", 2),
            ("bounds 4 4\n\n\ncircle a 1 1\n", 4),
            ("bounds 4 4\nsquare 1 1\n", 2),
            ("bounds 4 -4\n", 1),
            ("bounds 4 4\nbounds 4 4\n", 2),
            ("bounds 4 4\ncircle 20 20 1\n", 2),
            ("rect 1 1 1 1\n", 0),
        ];
        for (text, line) in cases {
            match World::parse(text) {
                Err(SimError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn rejects_non_finite_numbers() {
        assert!(World::parse("bounds inf 4\n").is_err());
        assert!(World::parse("bounds 4 4\ncircle NaN 1 1\n").is_err());
    }

    #[test]
    fn disk_against_walls() {
        let w = World::empty("e", 4.0, 4.0).unwrap();
        assert!(!w.disk_collides(Point::new(2.0, 2.0), 0.2));
        assert!(w.disk_collides(Point::new(0.1, 2.0), 0.2));
        assert!((w.clearance(Point::new(1.0, 2.0)) - 1.0).abs() < 1e-12);
    }
}
