use super::OffrlError;
use crate::nn::Activation;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Behaviour cloning on successful transitions.
    Bc,
    /// IQL on successful transitions only.
    IqlSo,
    /// IQL on the directly pooled dataset.
    IqlDm,
    /// Asymmetric IQL: stratified critic batches, success-only policy batches.
    IqlCa,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Bc, Method::IqlSo, Method::IqlDm, Method::IqlCa];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Bc => "bc",
            Method::IqlSo => "iql_so",
            Method::IqlDm => "iql_dm",
            Method::IqlCa => "iql_ca",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Bc => "BC",
            Method::IqlSo => "IQL-SO",
            Method::IqlDm => "IQL-DM",
            Method::IqlCa => "IQL-CA",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = OffrlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s || m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| OffrlError::Config(format!("unknown method `{s}` (bc|iql_so|iql_dm|iql_ca)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerConfig {
    pub method: Method,
    /// Expectile τ of the value regression.
    pub expectile: f64,
    pub gamma: f64,
    /// Advantage temperature β.
    pub temperature: f64,
    /// Per-sample cap on `exp(β·A)`.
    pub max_weight: f64,
    /// Collision share ρ of every critic batch (iql_ca only).
    pub collision_ratio: f64,
    pub batch_size: usize,
    pub lr_value: f64,
    pub lr_critic: f64,
    pub lr_actor: f64,
    /// Soft target coefficient α.
    pub target_update: f64,
    pub total_steps: u64,
    pub steps_per_epoch: u64,
    /// Checkpoint interval in steps.
    pub eval_every: u64,
    pub seed: u64,
    pub hidden: Vec<usize>,
    pub activation: Activation,
    pub n_critics: usize,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            method: Method::IqlCa,
            expectile: 0.7,
            gamma: 0.99,
            temperature: 1.0,
            max_weight: 100.0,
            collision_ratio: 0.015,
            batch_size: 256,
            lr_value: 3e-4,
            lr_critic: 3e-4,
            lr_actor: 3e-4,
            target_update: 0.005,
            total_steps: 30_000,
            steps_per_epoch: 1_000,
            eval_every: 10_000,
            seed: 0,
            hidden: vec![256, 256],
            activation: Activation::Relu,
            n_critics: 2,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<(), OffrlError> {
        let bad = |m: &str| Err(OffrlError::Config(m.to_string()));
        if !(self.expectile > 0.0 && self.expectile < 1.0) {
            return bad("expectile must lie in (0, 1)");
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1)");
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be a finite positive number");
        }
        if !(self.max_weight >= 1.0) {
            return bad("max_weight must be ≥ 1");
        }
        if !(0.0..1.0).contains(&self.collision_ratio) {
            return bad("collision_ratio must lie in [0, 1)");
        }
        if self.batch_size == 0 || self.steps_per_epoch == 0 || self.eval_every == 0 {
            return bad("batch_size, steps_per_epoch and eval_every must be positive");
        }
        if [self.lr_value, self.lr_critic, self.lr_actor].iter().any(|lr| !(*lr > 0.0)) {
            return bad("learning rates must be positive");
        }
        if !(self.target_update > 0.0 && self.target_update <= 1.0) {
            return bad("target_update must lie in (0, 1]");
        }
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return bad("hidden widths must be non-empty and positive");
        }
        if self.n_critics != 2 {
            return bad("exactly two critics are supported");
        }
        Ok(())
    }
}
