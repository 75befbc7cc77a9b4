//! Rollout evaluation over persisted task suites: success / collision /
//! timeout rates, trajectory export, and cross-method comparison tables.

mod compare;
mod export;
mod rollout;
mod suite;

pub use compare::{compare, Cell, Comparison, ComparisonRow};
pub use export::{export_trajectories, render_svg, trajectory_csv};
pub use rollout::{
    evaluate_suite, jittered_start, rates, rollout, ConstantController, Controller, EvalOptions, EvalResult,
    ExpertController, MeanStd, PolicyController, Rollout, TrialSummary, ZeroController, JITTER_HEADING, JITTER_POS,
};
pub use suite::{generate_suite, Task, TaskSuite};

use crate::expert::ExpertError;
use crate::nn::NnError;
use crate::offrl::OffrlError;
use crate::sim::SimError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("shape mismatch: checkpoint expects {expected} inputs, encoder produces {found}")]
    Shape { expected: usize, found: usize },
    #[error("suite line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Expert(#[from] ExpertError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Offrl(#[from] OffrlError),
}

impl From<std::io::Error> for EvalError {
    fn from(e: std::io::Error) -> Self {
        EvalError::Io(e.to_string())
    }
}
