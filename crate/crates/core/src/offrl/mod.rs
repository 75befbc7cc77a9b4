//! Implicit Q-learning objectives and the four trainers: behaviour
//! cloning, IQL on successes only, IQL on pooled data, and the asymmetric
//! variant whose critics see stratified success/collision batches while
//! the policy sees successes only.

mod config;
pub mod losses;
mod trainer;

pub use config::{Method, TrainerConfig};
pub use losses::{
    advantage_weights, awr_objective, bc_objective, critic_objective, expectile_loss, expectile_loss_grad, td_loss,
    td_loss_grad, value_objective, weighted_policy_objective, PolicyBatch, TdTargets,
};
pub use trainer::{check_dataset, CheckpointMeta, normalized_action, train, Batch, EpochRecord, Learner, RunStats, StepLosses, TrainReport};

use crate::data::DataError;
use crate::nn::NnError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum OffrlError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("policy contract violated: {0}")]
    ContractViolation(String),
    #[error("non-finite {loss} loss at step {step}")]
    NonFinite { step: u64, loss: &'static str },
    #[error("non-finite activation in layer {layer} at step {step}")]
    NonFiniteLayer { step: u64, layer: usize },
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Data(#[from] DataError),
}
