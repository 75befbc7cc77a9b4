//! Seeded procedural rooms with a verified connected free space.

use crate::expert::plan_path;
use crate::rng::{domain, stream};
use crate::sim::{Circle, Point, Rect, Shape, SimError, World};
use rand::Rng;
use serde::{Deserialize, Serialize};

pub const PROBE_PAIRS: usize = 20;
pub const MAX_ATTEMPTS: u64 = 100;
const COVERAGE_RESOLUTION: f64 = 0.05;
const SHAPES_PER_M2: f64 = 20.0;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GenError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("no connected layout at density {density} after {attempts} attempts")]
    Disconnected { density: f64, attempts: u64 },
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldGenConfig {
    pub name: String,
    pub width: f64,
    pub height: f64,
    /// Target fraction of the floor covered by obstacles.
    pub density: f64,
    /// Free radius the probe planner keeps around the robot centre.
    pub clearance: f64,
    pub seed: u64,
}

impl Default for WorldGenConfig {
    fn default() -> Self {
        Self { name: "generated".into(), width: 10.0, height: 10.0, density: 0.1, clearance: 0.3, seed: 0 }
    }
}

/// Floor occupancy on a fine grid, updated one shape at a time.
struct Coverage {
    nx: usize,
    ny: usize,
    cells: Vec<bool>,
    hit: usize,
}

impl Coverage {
    fn new(w: f64, h: f64) -> Self {
        let (nx, ny) = ((w / COVERAGE_RESOLUTION) as usize, (h / COVERAGE_RESOLUTION) as usize);
        Self { nx, ny, cells: vec![false; nx * ny], hit: 0 }
    }

    fn add(&mut self, shape: &Shape) {
        let (x0, y0, x1, y1) = shape.aabb();
        let idx = |v: f64, n: usize| ((v / COVERAGE_RESOLUTION).floor().max(0.0) as usize).min(n);
        for i in idx(x0, self.nx)..idx(x1, self.nx - 1) + 1 {
            for j in idx(y0, self.ny)..idx(y1, self.ny - 1) + 1 {
                let p = Point::new((i as f64 + 0.5) * COVERAGE_RESOLUTION, (j as f64 + 0.5) * COVERAGE_RESOLUTION);
                let c = &mut self.cells[i * self.ny + j];
                if !*c && shape.distance_to(p) <= 0.0 {
                    *c = true;
                    self.hit += 1;
                }
            }
        }
    }

    fn fraction(&self) -> f64 {
        self.hit as f64 / self.cells.len() as f64
    }
}

#[cfg(test)]
fn coverage(world: &World) -> f64 {
    let mut c = Coverage::new(world.width, world.height);
    world.obstacles.iter().for_each(|o| c.add(o));
    c.fraction()
}

fn random_shape<R: Rng>(rng: &mut R, w: f64, h: f64) -> Shape {
    if rng.gen_bool(0.5) {
        let (sw, sh) = (rng.gen_range(0.3..1.2), rng.gen_range(0.3..1.2));
        Shape::Rect(Rect { x: rng.gen_range(0.0..w - sw), y: rng.gen_range(0.0..h - sh), w: sw, h: sh })
    } else {
        let r = rng.gen_range(0.15..0.6);
        Shape::Circle(Circle { center: Point::new(rng.gen_range(r..w - r), rng.gen_range(r..h - r)), radius: r })
    }
}

/// All probe pairs of free points are mutually reachable.
pub fn probe_connected<R: Rng>(world: &World, clearance: f64, rng: &mut R) -> bool {
    let free = |rng: &mut R| {
        (0..1000).find_map(|_| {
            let p = Point::new(rng.gen_range(0.0..world.width), rng.gen_range(0.0..world.height));
            (world.clearance(p) >= clearance).then_some(p)
        })
    };
    for _ in 0..PROBE_PAIRS {
        let (Some(a), Some(b)) = (free(rng), free(rng)) else { return false };
        if plan_path(world, a, b, clearance).is_err() {
            return false;
        }
    }
    true
}

pub fn gen_world(cfg: &WorldGenConfig) -> Result<World, GenError> {
    if !(0.0..=1.0).contains(&cfg.density) {
        return Err(GenError::Config(format!("density {} outside [0, 1]", cfg.density)));
    }
    if !(cfg.width >= 2.0 && cfg.height >= 2.0 && cfg.clearance > 0.0) {
        return Err(GenError::Config("rooms need sides ≥ 2 m and a positive clearance".into()));
    }
    if cfg.name.is_empty() || cfg.name.contains(char::is_whitespace) {
        return Err(GenError::Config(format!("world name `{}` must be a single non-empty word", cfg.name)));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream(cfg.seed, domain::WORLD, attempt);
        let mut world = World::empty(cfg.name.clone(), cfg.width, cfg.height)?;
        let mut cov = Coverage::new(cfg.width, cfg.height);
        let max_shapes = (cfg.width * cfg.height * SHAPES_PER_M2) as usize;
        while cov.fraction() < cfg.density && world.obstacles.len() < max_shapes {
            let shape = random_shape(&mut rng, cfg.width, cfg.height);
            cov.add(&shape);
            world.obstacles.push(shape);
        }
        if cov.fraction() < cfg.density {
            continue;
        }
        // re-read through the text format so files and memory agree bitwise
        let world = World::parse(&world.to_text())?;
        if probe_connected(&world, cfg.clearance, &mut rng) {
            return Ok(world);
        }
    }
    Err(GenError::Disconnected { density: cfg.density, attempts: MAX_ATTEMPTS })
}
