use super::DataError;
use crate::sim::{NavState, RobotSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Maps a [`NavState`] onto the fixed-width network input
/// `[scan/range_max…, d/d_norm, φ/π, v/v_max, ω/ω_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateEncoder {
    pub beam_count: usize,
    pub range_max: f64,
    /// Distance normaliser; the diagonal of the collection world.
    pub d_norm: f64,
    pub v_max: f64,
    pub omega_max: f64,
}

impl StateEncoder {
    pub fn new(spec: &RobotSpec, d_norm: f64) -> Self {
        Self {
            beam_count: spec.lidar_beam_count,
            range_max: spec.lidar_range_max,
            d_norm,
            v_max: spec.v_max,
            omega_max: spec.omega_max,
        }
    }

    pub fn dim(&self) -> usize {
        self.beam_count + 4
    }

    pub fn encode(&self, state: &NavState) -> Result<Vec<f32>, DataError> {
        let mut out = Vec::with_capacity(self.dim());
        self.encode_into(state, &mut out)?;
        Ok(out)
    }

    pub fn encode_into(&self, state: &NavState, out: &mut Vec<f32>) -> Result<(), DataError> {
        if state.scan.len() != self.beam_count {
            return Err(DataError::Shape { expected: self.beam_count, found: state.scan.len() });
        }
        out.extend(state.scan.iter().map(|r| (r / self.range_max).clamp(0.0, 1.0) as f32));
        out.push((state.goal_dist / self.d_norm).clamp(0.0, 1.0) as f32);
        out.push((state.goal_bearing / PI).clamp(-1.0, 1.0) as f32);
        out.push((state.lin_vel / self.v_max).clamp(-1.0, 1.0) as f32);
        out.push((state.ang_vel / self.omega_max).clamp(-1.0, 1.0) as f32);
        Ok(())
    }

    /// Goal distance in meters recovered from an encoded vector.
    pub fn goal_dist(&self, features: &[f32]) -> f64 {
        features[self.beam_count] as f64 * self.d_norm
    }

    /// Smallest LiDAR range in meters recovered from an encoded vector.
    pub fn min_range(&self, features: &[f32]) -> f64 {
        features[..self.beam_count].iter().fold(f32::INFINITY, |a, &b| a.min(b)) as f64 * self.range_max
    }
}
