use super::{expert_action, plan_path, ExpertConfig, ExpertError};
use crate::data::{DatasetMeta, OfflineDataset, Outcome, StateEncoder, Transition};
use crate::rng::{domain, stream};
use crate::sim::{normalize_angle, Episode, EpisodeConfig, Point, Pose, RobotSpec, Terminal, World};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const MIN_TASK_SEPARATION: f64 = 3.0;
pub const MAX_TASK_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CollectMode {
    Clean,
    Perturbed,
}

impl std::str::FromStr for CollectMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clean" => Ok(Self::Clean),
            "perturbed" => Ok(Self::Perturbed),
            other => Err(format!("unknown collection mode `{other}` (clean|perturbed)")),
        }
    }
}

/// One finished expert episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: u64,
    pub terminal: Terminal,
    pub transitions: Vec<Transition>,
    pub poses: Vec<Pose>,
}

impl Trajectory {
    pub fn outcome(&self) -> Option<Outcome> {
        match self.terminal {
            Terminal::Success => Some(Outcome::Success),
            Terminal::Collision => Some(Outcome::Collision),
            _ => None,
        }
    }
}

/// Draws a collision-free start pose and goal at least 3 m apart that the
/// planner can connect; `max_path` optionally bounds the planned length.
pub fn sample_task<R: Rng>(
    world: &World,
    clearance: f64,
    max_path: Option<f64>,
    rng: &mut R,
) -> Result<(Pose, Point), ExpertError> {
    let lo = clearance;
    if world.width <= 2.0 * lo || world.height <= 2.0 * lo {
        return Err(ExpertError::Config(format!("world {} is too small for clearance {clearance}", world.name)));
    }
    let draw = |rng: &mut R| Point::new(rng.gen_range(lo..world.width - lo), rng.gen_range(lo..world.height - lo));
    for _ in 0..MAX_TASK_ATTEMPTS {
        let start = draw(rng);
        let goal = draw(rng);
        let heading = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        if start.dist(&goal) < MIN_TASK_SEPARATION || world.clearance(start) < clearance || world.clearance(goal) < clearance {
            continue;
        }
        match plan_path(world, start, goal, clearance) {
            Ok(path) if max_path.map_or(true, |m| super::path_length(&path) <= m) => {
                return Ok((Pose::new(start.x, start.y, normalize_angle(heading)), goal));
            }
            _ => continue,
        }
    }
    Err(ExpertError::Config(format!("no valid start/goal pair in {} after {MAX_TASK_ATTEMPTS} samples", world.name)))
}

/// Everything an expert episode needs besides its index.
#[derive(Debug, Clone, Copy)]
pub struct Collector<'w> {
    pub world: &'w World,
    pub spec: RobotSpec,
    pub episode: EpisodeConfig,
    pub expert: ExpertConfig,
    pub encoder: StateEncoder,
}

impl<'w> Collector<'w> {
    pub fn new(world: &'w World, spec: RobotSpec, episode: EpisodeConfig, expert: ExpertConfig) -> Self {
        let encoder = StateEncoder::new(&spec, world.diagonal());
        Self { world, spec, episode, expert, encoder }
    }

    /// Runs episode `index`; identical indices give identical trajectories.
    pub fn run_episode(&self, mode: CollectMode, index: u64) -> Result<Trajectory, ExpertError> {
        self.expert.validate()?;
        let clearance = self.spec.radius + self.expert.inflation;
        let mut task_rng = stream(self.expert.seed, domain::EPISODE, index);
        let (start, goal) = sample_task(self.world, clearance, None, &mut task_rng)?;
        let path = plan_path(self.world, start.position(), goal, clearance)?;
        let mut noise_rng = stream(self.expert.seed, domain::EPISODE ^ 0xff, index);
        let v_noise = Normal::new(0.0, self.expert.noise_std[0]).map_err(|e| ExpertError::Config(e.to_string()))?;
        let w_noise = Normal::new(0.0, self.expert.noise_std[1]).map_err(|e| ExpertError::Config(e.to_string()))?;

        let mut ep = Episode::new(self.world, self.spec, self.episode, start, goal)?;
        let mut transitions = Vec::new();
        let mut poses = vec![start];
        let mut s = self.encoder.encode(ep.state())?;
        loop {
            let mut action = expert_action(ep.pose(), &path, &self.expert, &self.spec)?;
            if mode == CollectMode::Perturbed && self.expert.noise_prob > 0.0 && noise_rng.gen_bool(self.expert.noise_prob) {
                action.v_cmd += v_noise.sample(&mut noise_rng);
                action.omega_cmd += w_noise.sample(&mut noise_rng);
            }
            let applied = action.clamped(&self.spec);
            let out = ep.step(&applied)?;
            let s_next = self.encoder.encode(&out.next_state)?;
            transitions.push(Transition {
                s: std::mem::replace(&mut s, s_next.clone()),
                a: [applied.v_cmd as f32, applied.omega_cmd as f32],
                r: out.reward as f32,
                s_next,
                done: matches!(out.terminal, Terminal::Success | Terminal::Collision),
                outcome: Outcome::Success,
                traj_id: index,
                t: (ep.t() - 1) as u32,
            });
            poses.push(*ep.pose());
            if out.terminal.is_terminal() {
                let label = if out.terminal == Terminal::Collision { Outcome::Collision } else { Outcome::Success };
                transitions.iter_mut().for_each(|t| t.outcome = label);
                return Ok(Trajectory { id: index, terminal: out.terminal, transitions, poses });
            }
        }
    }

    /// Episodes `first..first + n` in parallel, returned in index order.
    pub fn collect(&self, n_episodes: usize, mode: CollectMode, first: u64) -> Result<Vec<Trajectory>, ExpertError> {
        if n_episodes == 0 {
            return Err(ExpertError::Config("at least one episode is required".into()));
        }
        (0..n_episodes as u64).into_par_iter().map(|i| self.run_episode(mode, first + i)).collect()
    }

    pub fn empty_dataset(&self, generation: String) -> OfflineDataset {
        OfflineDataset::new(DatasetMeta { encoder: self.encoder, episode: self.episode, generation })
    }

    /// Mixes clean and perturbed episodes until roughly `total` transitions
    /// exist with a `col_ratio` share from collision trajectories. A
    /// `clean_share` of the success quota comes from clean episodes, the rest
    /// from perturbed episodes that still reached the goal. Whole
    /// trajectories are kept, so each quota may overshoot by one episode.
    pub fn collect_dataset(&self, total: usize, col_ratio: f64, clean_share: f64, generation: String) -> Result<OfflineDataset, ExpertError> {
        if total == 0 || !(0.0..1.0).contains(&col_ratio) || !(0.0..=1.0).contains(&clean_share) {
            return Err(ExpertError::Config(format!(
                "need total > 0, ratio in [0, 1) and clean share in [0, 1], got {total}, {col_ratio}, {clean_share}"
            )));
        }
        let col_quota = (col_ratio * total as f64).round() as usize;
        let exp_quota = total - col_quota;
        let clean_quota = (clean_share * exp_quota as f64).round() as usize;
        let pert_quota = exp_quota - clean_quota;
        let mut ds = self.empty_dataset(generation);
        const CHUNK: usize = 16;
        const PERTURBED_BASE: u64 = 1 << 40;
        let (mut clean_next, mut pert_next) = (0u64, PERTURBED_BASE);
        let (mut clean_exp, mut pert_exp) = (0usize, 0usize);
        let max_episodes = 200 * (total / 20 + 1) as u64;
        while clean_exp < clean_quota || pert_exp < pert_quota || ds.col.len() < col_quota {
            if clean_next + (pert_next - PERTURBED_BASE) > max_episodes {
                return Err(ExpertError::Config(format!(
                    "quotas not met after {max_episodes} episodes (clean {clean_exp}/{clean_quota}, perturbed {pert_exp}/{pert_quota}, col {}/{col_quota})",
                    ds.col.len()
                )));
            }
            let (mode, first) = if ds.col.len() < col_quota || pert_exp < pert_quota {
                (CollectMode::Perturbed, pert_next)
            } else {
                (CollectMode::Clean, clean_next)
            };
            for traj in self.collect(CHUNK, mode, first)? {
                let n = traj.transitions.len();
                match (traj.outcome(), mode) {
                    (Some(Outcome::Success), CollectMode::Clean) if clean_exp < clean_quota => clean_exp += n,
                    (Some(Outcome::Success), CollectMode::Perturbed) if pert_exp < pert_quota => pert_exp += n,
                    (Some(Outcome::Collision), _) if ds.col.len() < col_quota => {}
                    _ => continue,
                }
                ds.push_trajectory(traj.transitions)?;
            }
            match mode {
                CollectMode::Perturbed => pert_next += CHUNK as u64,
                CollectMode::Clean => clean_next += CHUNK as u64,
            }
        }
        Ok(ds)
    }
}
