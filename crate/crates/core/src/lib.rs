//! Failure-aware offline reinforcement learning for mapless 2-D navigation.
//!
//! Critics learn from both successful and collision trajectories; the
//! policy is extracted from successful transitions only.

pub mod sim;
pub mod data;
mod rng;
pub mod nn;
pub mod expert;
pub mod offrl;
pub mod eval;
pub mod worldgen;
pub mod config;
pub mod pipeline;
mod error;

pub use error::{Error, ErrorKind};
