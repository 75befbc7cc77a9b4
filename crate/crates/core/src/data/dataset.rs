use super::{DataError, StateEncoder};
use crate::sim::EpisodeConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Success,
    Collision,
}

impl Outcome {
    pub(crate) fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Collision => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Outcome::Success),
            1 => Some(Outcome::Collision),
            _ => None,
        }
    }
}

/// One `(s, a, r, s′)` record tagged with the outcome of its trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub s: Vec<f32>,
    /// Commanded `(v, ω)` in physical units after clamping.
    pub a: [f32; 2],
    pub r: f32,
    pub s_next: Vec<f32>,
    pub done: bool,
    pub outcome: Outcome,
    pub traj_id: u64,
    pub t: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub encoder: StateEncoder,
    pub episode: EpisodeConfig,
    /// Free-form generation record (world, seeds, collector settings).
    pub generation: String,
}

impl DatasetMeta {
    pub fn digest(&self) -> [u8; 32] {
        let json = serde_json::to_vec(self).expect("meta serializes");
        Sha256::digest(&json).into()
    }
}

/// The two outcome partitions `exp` (successful) and `col` (collision).
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineDataset {
    pub exp: Vec<Transition>,
    pub col: Vec<Transition>,
    pub meta: DatasetMeta,
}

impl OfflineDataset {
    pub fn new(meta: DatasetMeta) -> Self {
        Self { exp: Vec::new(), col: Vec::new(), meta }
    }

    pub fn len(&self) -> usize {
        self.exp.len() + self.col.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fraction of all transitions that came from collision trajectories.
    pub fn collision_fraction(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.col.len() as f64 / self.len() as f64
        }
    }

    /// Routes a whole trajectory to the partition matching its label.
    pub fn push_trajectory(&mut self, transitions: Vec<Transition>) -> Result<(), DataError> {
        let Some(first) = transitions.first() else {
            return Ok(());
        };
        let outcome = first.outcome;
        let dim = self.meta.encoder.dim();
        for (i, tr) in transitions.iter().enumerate() {
            if tr.outcome != outcome || tr.traj_id != first.traj_id {
                return Err(DataError::Invariant("trajectory mixes labels or ids".into()));
            }
            if tr.s.len() != dim || tr.s_next.len() != dim {
                return Err(DataError::Shape { expected: dim, found: tr.s.len().max(tr.s_next.len()) });
            }
            if tr.done != (i + 1 == transitions.len()) {
                return Err(DataError::Invariant(format!("done flag misplaced in trajectory {}", tr.traj_id)));
            }
        }
        match outcome {
            Outcome::Success => self.exp.extend(transitions),
            Outcome::Collision => self.col.extend(transitions),
        }
        Ok(())
    }

    /// Checks partition purity, shapes, done placement and reward consistency.
    pub fn validate(&self, reward_tol: f64) -> Result<(), DataError> {
        let dim = self.meta.encoder.dim();
        let mut last_step: BTreeMap<u64, (u32, bool, Outcome)> = BTreeMap::new();
        for (part, label) in [(&self.exp, Outcome::Success), (&self.col, Outcome::Collision)] {
            for tr in part.iter() {
                if tr.outcome != label {
                    return Err(DataError::Invariant(format!("trajectory {} is in the wrong partition", tr.traj_id)));
                }
                if tr.s.len() != dim || tr.s_next.len() != dim {
                    return Err(DataError::Shape { expected: dim, found: tr.s.len() });
                }
                let entry = last_step.entry(tr.traj_id).or_insert((tr.t, tr.done, tr.outcome));
                if entry.2 != tr.outcome {
                    return Err(DataError::Invariant(format!("trajectory {} carries two labels", tr.traj_id)));
                }
                if tr.t >= entry.0 {
                    *entry = (tr.t, tr.done, tr.outcome);
                } else if tr.done {
                    return Err(DataError::Invariant(format!("trajectory {} has done before its end", tr.traj_id)));
                }
                let expected = self.expected_reward(tr);
                if (tr.r as f64 - expected).abs() > reward_tol {
                    return Err(DataError::Invariant(format!(
                        "reward {} != recomputed {expected} (trajectory {}, t={})",
                        tr.r, tr.traj_id, tr.t
                    )));
                }
            }
        }
        if let Some((id, _)) = last_step.iter().find(|(_, (_, done, _))| !done) {
            return Err(DataError::Invariant(format!("trajectory {id} has no terminal transition")));
        }
        Ok(())
    }

    /// Reward implied by the stored endpoints and the terminal flag.
    pub fn expected_reward(&self, tr: &Transition) -> f64 {
        let ep = &self.meta.episode;
        match (tr.done, tr.outcome) {
            (true, Outcome::Success) => ep.r_success,
            (true, Outcome::Collision) => ep.r_collision,
            _ => ep.c1 * (self.meta.encoder.goal_dist(&tr.s) - self.meta.encoder.goal_dist(&tr.s_next)),
        }
    }
}
