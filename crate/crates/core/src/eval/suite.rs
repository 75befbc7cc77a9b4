use super::EvalError;
use crate::expert::sample_task;
use crate::rng::{domain, stream};
use crate::sim::{EpisodeConfig, Point, Pose, World};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub start: Pose,
    pub goal: Point,
}

/// Fixed list of start/goal pairs shared by every evaluated method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSuite {
    pub world: String,
    pub episode: EpisodeConfig,
    pub tasks: Vec<Task>,
}

/// Samples `n` planner-reachable tasks with at least `clearance` free space
/// around both endpoints and optionally a bounded path length.
pub fn generate_suite(
    world: &World,
    episode: EpisodeConfig,
    n: usize,
    clearance: f64,
    max_path: Option<f64>,
    seed: u64,
) -> Result<TaskSuite, EvalError> {
    if n == 0 {
        return Err(EvalError::Config("a suite needs at least one task".into()));
    }
    let tasks = (0..n as u64)
        .map(|i| {
            let mut rng = stream(seed, domain::TASKS, i);
            let (start, goal) = sample_task(world, clearance, max_path, &mut rng)?;
            Ok(Task { start, goal })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(TaskSuite { world: world.name.clone(), episode, tasks })
}

impl TaskSuite {
    /// Checks every endpoint against the world with `radius` clearance.
    pub fn validate(&self, world: &World, radius: f64) -> Result<(), EvalError> {
        if self.tasks.is_empty() {
            return Err(EvalError::Config("suite is empty".into()));
        }
        if self.world != world.name {
            return Err(EvalError::Protocol(format!("suite is for world `{}`, not `{}`", self.world, world.name)));
        }
        for (i, t) in self.tasks.iter().enumerate() {
            for p in [t.start.position(), t.goal] {
                if !world.inside_bounds(p) || world.clearance(p) < radius {
                    return Err(EvalError::Config(format!("task {i}: ({:.3}, {:.3}) is not collision-free", p.x, p.y)));
                }
            }
        }
        self.episode.validate()?;
        Ok(())
    }

    pub fn digest(&self) -> String {
        Sha256::digest(self.to_text().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_text(&self) -> String {
        let e = &self.episode;
        let mut out = format!("world {}\n", self.world);
        for (k, v) in [
            ("gamma", e.gamma),
            ("t_max", e.t_max as f64),
            ("r_success", e.r_success),
            ("r_collision", e.r_collision),
            ("c1", e.c1),
            ("goal_radius", e.goal_radius),
        ] {
            let _ = writeln!(out, "{k} {v}");
        }
        for t in &self.tasks {
            let _ = writeln!(out, "task {} {} {} {} {}", t.start.x, t.start.y, t.start.heading, t.goal.x, t.goal.y);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut world = None;
        let mut episode = EpisodeConfig::default();
        let mut tasks = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| EvalError::Parse { line: i + 1, message };
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let rest: Vec<&str> = parts.collect();
            if key == "world" {
                match rest.as_slice() {
                    [name] => world = Some(name.to_string()),
                    _ => return Err(err("expected `world <name>`".into())),
                }
                continue;
            }
            let nums = rest
                .iter()
                .map(|s| s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| err(format!("bad number `{s}`"))))
                .collect::<Result<Vec<f64>, _>>()?;
            let one = || match nums.as_slice() {
                [v] => Ok(*v),
                _ => Err(err(format!("`{key}` takes one value"))),
            };
            match key {
                "task" => match nums.as_slice() {
                    [sx, sy, sh, gx, gy] => tasks.push(Task { start: Pose::new(*sx, *sy, *sh), goal: Point::new(*gx, *gy) }),
                    _ => return Err(err("expected `task sx sy sh gx gy`".into())),
                },
                "gamma" => episode.gamma = one()?,
                "t_max" => {
                    let v = one()?;
                    if v < 1.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                        return Err(err("t_max must be a positive integer".into()));
                    }
                    episode.t_max = v as usize;
                }
                "r_success" => episode.r_success = one()?,
                "r_collision" => episode.r_collision = one()?,
                "c1" => episode.c1 = one()?,
                "goal_radius" => episode.goal_radius = one()?,
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        let world = world.ok_or(EvalError::Parse { line: 0, message: "missing `world` line".into() })?;
        episode.validate()?;
        Ok(Self { world, episode, tasks })
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        Self::parse(&std::fs::read_to_string(path).map_err(|e| EvalError::Io(format!("{}: {e}", path.display())))?)
    }

    pub fn save(&self, path: &Path) -> Result<(), EvalError> {
        std::fs::write(path, self.to_text()).map_err(|e| EvalError::Io(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let world = World::empty("room", 10.0, 10.0).unwrap();
        let suite = generate_suite(&world, EpisodeConfig::default(), 5, 0.3, None, 1).unwrap();
        let back = TaskSuite::parse(&suite.to_text()).unwrap();
        assert_eq!(back, suite);
        assert_eq!(back.digest(), suite.digest());
        suite.validate(&world, 0.2).unwrap();
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert!(matches!(TaskSuite::parse("world a\ntask 1 2 3\n"), Err(EvalError::Parse { line: 2, .. })));
        assert!(matches!(TaskSuite::parse("task 1 2 0 3 4\n"), Err(EvalError::Parse { line: 0, .. })));
        assert!(matches!(TaskSuite::parse("world a\nfoo 1\n"), Err(EvalError::Parse { line: 2, .. })));
        assert!(matches!(TaskSuite::parse("world a\nt_max 0.5\n"), Err(EvalError::Parse { line: 2, .. })));
    }

    #[test]
    fn generation_is_seeded_and_bounded() {
        let world = World::empty("room", 10.0, 10.0).unwrap();
        let a = generate_suite(&world, EpisodeConfig::default(), 8, 0.3, Some(6.0), 4).unwrap();
        let b = generate_suite(&world, EpisodeConfig::default(), 8, 0.3, Some(6.0), 4).unwrap();
        assert_eq!(a, b);
        assert!(a.tasks.iter().all(|t| t.start.position().dist(&t.goal) <= 6.0 + 1e-9));
    }
}
