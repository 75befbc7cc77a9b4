//! Deterministic 2-D navigation world: differential-drive kinematics,
//! raycast LiDAR and the success/collision/dense-progress reward.

mod env;
pub mod geometry;
mod kinematics;
mod lidar;
mod world;

pub use env::{relative_goal, step_env, Episode, StepOutcome, Terminal};
pub use geometry::{normalize_angle, Circle, Point, Rect, Shape};
pub use kinematics::step_kinematics;
pub use lidar::raycast;
pub use world::World;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid pose: {0}")]
    InvalidPose(String),
    #[error("non-finite numeric input: {0}")]
    NonFinite(&'static str),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("invalid world: {0}")]
    InvalidWorld(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("world file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Radians in (−π, π].
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading: normalize_angle(heading) }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Action {
    pub v_cmd: f64,
    pub omega_cmd: f64,
}

impl Action {
    pub const fn new(v_cmd: f64, omega_cmd: f64) -> Self {
        Self { v_cmd, omega_cmd }
    }

    pub fn clamped(&self, spec: &RobotSpec) -> Action {
        Action {
            v_cmd: self.v_cmd.clamp(-spec.v_max, spec.v_max),
            omega_cmd: self.omega_cmd.clamp(-spec.omega_max, spec.omega_max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotSpec {
    pub radius: f64,
    pub v_max: f64,
    pub omega_max: f64,
    pub lidar_fov: f64,
    pub lidar_beam_count: usize,
    pub lidar_range_max: f64,
    pub control_dt: f64,
}

impl Default for RobotSpec {
    fn default() -> Self {
        Self {
            radius: 0.2,
            v_max: 0.5,
            omega_max: PI / 2.0,
            lidar_fov: 1.5 * PI,
            lidar_beam_count: 108,
            lidar_range_max: 30.0,
            control_dt: 0.2,
        }
    }
}

impl RobotSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        let ok = self.radius > 0.0
            && self.v_max > 0.0
            && self.omega_max > 0.0
            && self.lidar_fov > 0.0
            && self.lidar_fov <= 2.0 * PI + 1e-12
            && self.lidar_beam_count > 0
            && self.lidar_range_max > 0.0
            && self.control_dt > 0.0;
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(format!("robot spec out of range: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpisodeConfig {
    pub gamma: f64,
    pub t_max: usize,
    pub r_success: f64,
    pub r_collision: f64,
    /// Dense progress reward per meter of goal distance closed.
    pub c1: f64,
    pub goal_radius: f64,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self { gamma: 0.99, t_max: 200, r_success: 20.0, r_collision: -20.0, c1: 2.0, goal_radius: 0.3 }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let ok = (0.0..1.0).contains(&self.gamma)
            && self.t_max >= 1
            && self.r_success > 0.0
            && self.r_collision < 0.0
            && self.c1 > 0.0
            && self.goal_radius > 0.0;
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(format!("episode config out of range: {self:?}")))
        }
    }
}

/// The observation handed to controllers at every control tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NavState {
    pub scan: Vec<f64>,
    pub goal_dist: f64,
    pub goal_bearing: f64,
    pub lin_vel: f64,
    pub ang_vel: f64,
}
