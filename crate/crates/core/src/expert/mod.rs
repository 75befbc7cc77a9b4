//! Scripted demonstrator: A* planning plus pure pursuit, with an optional
//! perturbation mode that produces collision trajectories.

mod collect;
mod planner;
mod pursuit;

pub use collect::{sample_task, CollectMode, Collector, Trajectory, MAX_TASK_ATTEMPTS, MIN_TASK_SEPARATION};
pub use planner::{path_length, plan_path, segment_clear, GRID_RESOLUTION};
pub use pursuit::{expert_action, lookahead_point, steer};

use crate::data::DataError;
use crate::sim::{Point, SimError};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ExpertError {
    #[error("no path from ({:.2}, {:.2}) to ({:.2}, {:.2})", from.x, from.y, to.x, to.y)]
    NoPath { from: Point, to: Point },
    #[error("endpoint blocked: {0}")]
    Blocked(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpertConfig {
    pub lookahead: f64,
    pub gain_heading: f64,
    pub speed_scale: f64,
    /// Gaussian std on (v, ω) in perturbed mode.
    pub noise_std: [f64; 2],
    pub noise_prob: f64,
    /// Extra planner clearance on top of the robot radius.
    pub inflation: f64,
    pub seed: u64,
}

impl Default for ExpertConfig {
    fn default() -> Self {
        Self { lookahead: 0.5, gain_heading: 2.0, speed_scale: 0.9, noise_std: [0.3, 1.5], noise_prob: 0.3, inflation: 0.1, seed: 0 }
    }
}

impl ExpertConfig {
    pub fn validate(&self) -> Result<(), ExpertError> {
        let ok = self.lookahead > 0.0
            && self.gain_heading > 0.0
            && self.speed_scale > 0.0
            && self.speed_scale <= 1.0
            && self.noise_std.iter().all(|s| *s >= 0.0 && s.is_finite())
            && (0.0..=1.0).contains(&self.noise_prob)
            && self.inflation >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(ExpertError::Config(format!("expert config out of range: {self:?}")))
        }
    }
}
