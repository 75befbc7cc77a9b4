//! 8-connected A* on an inflated occupancy grid followed by
//! line-of-sight shortcutting.

use super::ExpertError;
use crate::sim::{Point, World};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub const GRID_RESOLUTION: f64 = 0.1;

struct Grid<'w> {
    world: &'w World,
    cols: usize,
    rows: usize,
    blocked: Vec<bool>,
}

impl<'w> Grid<'w> {
    fn new(world: &'w World, clearance: f64) -> Self {
        let cols = (world.width / GRID_RESOLUTION).ceil().max(1.0) as usize;
        let rows = (world.height / GRID_RESOLUTION).ceil().max(1.0) as usize;
        let mut blocked = Vec::with_capacity(cols * rows);
        for r in 0..rows {
            for c in 0..cols {
                let p = Point::new((c as f64 + 0.5) * GRID_RESOLUTION, (r as f64 + 0.5) * GRID_RESOLUTION);
                blocked.push(!world.inside_bounds(p) || world.clearance(p) < clearance);
            }
        }
        Self { world, cols, rows, blocked }
    }

    fn cell_of(&self, p: Point) -> usize {
        let c = ((p.x / GRID_RESOLUTION).floor() as isize).clamp(0, self.cols as isize - 1) as usize;
        let r = ((p.y / GRID_RESOLUTION).floor() as isize).clamp(0, self.rows as isize - 1) as usize;
        r * self.cols + c
    }

    fn center(&self, idx: usize) -> Point {
        let (r, c) = (idx / self.cols, idx % self.cols);
        Point::new((c as f64 + 0.5) * GRID_RESOLUTION, (r as f64 + 0.5) * GRID_RESOLUTION)
    }

    fn free(&self, c: isize, r: isize) -> bool {
        c >= 0 && r >= 0 && (c as usize) < self.cols && (r as usize) < self.rows && !self.blocked[r as usize * self.cols + c as usize]
    }
}

#[derive(PartialEq)]
struct Node {
    f: f64,
    idx: usize,
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.total_cmp(&self.f).then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn octile(a: Point, b: Point) -> f64 {
    let dx = (a.x - b.x).abs();
    let dy = (a.y - b.y).abs();
    dx.max(dy) + (std::f64::consts::SQRT_2 - 1.0) * dx.min(dy)
}

/// Whether a disk of radius `clearance` can slide from `a` to `b`.
pub fn segment_clear(world: &World, a: Point, b: Point, clearance: f64) -> bool {
    let wall_ok = |p: Point| p.x >= clearance && p.y >= clearance && p.x <= world.width - clearance && p.y <= world.height - clearance;
    wall_ok(a) && wall_ok(b) && world.obstacles.iter().all(|s| s.segment_distance(a, b) >= clearance)
}

/// Shortest collision-free polyline from `start` to `goal` for a disk of
/// radius `clearance`.
pub fn plan_path(world: &World, start: Point, goal: Point, clearance: f64) -> Result<Vec<Point>, ExpertError> {
    for (p, what) in [(start, "start"), (goal, "goal")] {
        if !world.inside_bounds(p) {
            return Err(ExpertError::Blocked(format!("{what} ({:.2}, {:.2}) outside the world", p.x, p.y)));
        }
        if world.clearance(p) < clearance {
            return Err(ExpertError::Blocked(format!("{what} ({:.2}, {:.2}) lies inside an inflated obstacle", p.x, p.y)));
        }
    }
    if segment_clear(world, start, goal, clearance) {
        return Ok(vec![start, goal]);
    }
    let mut grid = Grid::new(world, clearance);
    let s = grid.cell_of(start);
    let g = grid.cell_of(goal);
    // endpoints are free in continuous space even if their cell centre is not
    grid.blocked[s] = false;
    grid.blocked[g] = false;

    let n = grid.blocked.len();
    let mut cost = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    cost[s] = 0.0;
    open.push(Node { f: octile(grid.center(s), grid.center(g)), idx: s });
    let diag = GRID_RESOLUTION * std::f64::consts::SQRT_2;
    while let Some(Node { idx, .. }) = open.pop() {
        if closed[idx] {
            continue;
        }
        if idx == g {
            break;
        }
        closed[idx] = true;
        let (r, c) = ((idx / grid.cols) as isize, (idx % grid.cols) as isize);
        for (dc, dr) in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let (nc, nr) = (c + dc, r + dr);
            if !grid.free(nc, nr) {
                continue;
            }
            let diagonal = dc != 0 && dr != 0;
            if diagonal && !(grid.free(c + dc, r) && grid.free(c, r + dr)) {
                continue;
            }
            let nidx = nr as usize * grid.cols + nc as usize;
            let step = if diagonal { diag } else { GRID_RESOLUTION };
            let cand = cost[idx] + step;
            if cand < cost[nidx] {
                cost[nidx] = cand;
                parent[nidx] = idx;
                open.push(Node { f: cand + octile(grid.center(nidx), grid.center(g)), idx: nidx });
            }
        }
    }
    if !cost[g].is_finite() {
        return Err(ExpertError::NoPath { from: start, to: goal });
    }
    let mut cells = vec![g];
    while let Some(&last) = cells.last() {
        if last == s {
            break;
        }
        cells.push(parent[last]);
    }
    cells.reverse();
    let mut raw = vec![start];
    raw.extend(cells[1..cells.len().saturating_sub(1)].iter().map(|&c| grid.center(c)));
    raw.push(goal);
    Ok(shortcut(grid.world, &raw, clearance))
}

fn shortcut(world: &World, raw: &[Point], clearance: f64) -> Vec<Point> {
    let mut out = vec![raw[0]];
    let mut i = 0;
    while i + 1 < raw.len() {
        let mut next = i + 1;
        for j in (i + 2..raw.len()).rev() {
            if segment_clear(world, raw[i], raw[j], clearance) {
                next = j;
                break;
            }
        }
        out.push(raw[next]);
        i = next;
    }
    out
}

pub fn path_length(path: &[Point]) -> f64 {
    path.windows(2).map(|w| w[0].dist(&w[1])).sum()
}
