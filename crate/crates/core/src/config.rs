//! Layered run configuration. The file echoes every default, including the
//! constants the method leaves open, so a run never hides a parameter.

use crate::expert::ExpertConfig;
use crate::offrl::TrainerConfig;
use crate::sim::{EpisodeConfig, RobotSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollectConfig {
    /// World the demonstrations are recorded in.
    pub world: PathBuf,
    /// Target transition count across both partitions.
    pub transitions: usize,
    /// Target collision share of all transitions.
    pub col_ratio: f64,
    /// Share of the success quota recorded without perturbation; the rest
    /// comes from perturbed episodes that reached the goal.
    pub clean_share: f64,
}

impl Default for CollectConfig {
    fn default() -> Self {
        Self { world: PathBuf::from("worlds/senv1.world"), transitions: 20_000, col_ratio: 0.1, clean_share: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub worlds: Vec<PathBuf>,
    pub tasks: usize,
    pub trials: usize,
    /// Per-trial start jitter (±0.1 m, ±0.1 rad).
    pub jitter: bool,
    /// Upper bound on the planned length of a suite task, metres.
    pub max_path: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            worlds: ["senv1", "senv2", "senv3"].iter().map(|w| PathBuf::from(format!("worlds/{w}.world"))).collect(),
            tasks: 50,
            trials: 3,
            jitter: true,
            max_path: 12.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Training seeds are `seed, seed + 1, …`.
    pub seeds: usize,
    pub methods: Vec<crate::offrl::Method>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { seeds: 3, methods: crate::offrl::Method::ALL.to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Global seed; sections derive theirs from it unless set explicitly.
    pub seed: u64,
    pub robot: RobotSpec,
    pub episode: EpisodeConfig,
    pub expert: ExpertConfig,
    pub collect: CollectConfig,
    pub trainer: TrainerConfig,
    pub eval: EvalConfig,
    pub pipeline: PipelineConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0,
            robot: RobotSpec::default(),
            episode: EpisodeConfig::default(),
            expert: ExpertConfig::default(),
            collect: CollectConfig::default(),
            trainer: TrainerConfig::default(),
            eval: EvalConfig::default(),
            pipeline: PipelineConfig::default(),
        }
    }
}

impl Config {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Parse { path: origin.to_string(), message: e.to_string() })?;
        Ok(cfg)
    }

    /// Loads `path`; relative world paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text, &path.display().to_string())?;
        if let Some(base) = path.parent() {
            let fix = |p: &mut PathBuf| {
                if p.is_relative() && !p.exists() && base.join(&*p).exists() {
                    *p = base.join(&*p);
                }
            };
            fix(&mut cfg.collect.world);
            cfg.eval.worlds.iter_mut().for_each(fix);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn digest(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Sets the global seed and every seed derived from it.
    pub fn apply_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.expert.seed = seed;
        self.trainer.seed = seed;
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let inv = |e: String| ConfigError::Invalid(e);
        self.robot.validate().map_err(|e| inv(e.to_string()))?;
        self.episode.validate().map_err(|e| inv(e.to_string()))?;
        self.expert.validate().map_err(|e| inv(e.to_string()))?;
        self.trainer.validate().map_err(|e| inv(e.to_string()))?;
        if self.collect.transitions == 0 || !(0.0..1.0).contains(&self.collect.col_ratio) || !(0.0..=1.0).contains(&self.collect.clean_share) {
            return Err(inv("collect needs transitions > 0, col_ratio in [0, 1) and clean_share in [0, 1]".into()));
        }
        if self.eval.tasks == 0 || self.eval.trials == 0 || self.eval.worlds.is_empty() || !(self.eval.max_path > 0.0) {
            return Err(inv("eval needs tasks, trials, worlds and a positive max_path".into()));
        }
        if self.pipeline.seeds == 0 || self.pipeline.methods.is_empty() {
            return Err(inv("pipeline needs at least one seed and one method".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_round_trips() {
        let cfg = Config::default();
        let text = cfg.to_toml();
        assert_eq!(Config::parse(&text, "echo").unwrap(), cfg);
        for key in ["expectile", "collision_ratio", "r_success", "goal_radius", "lidar_beam_count", "noise_prob", "max_path"] {
            assert!(text.contains(key), "{key} missing from echo");
        }
    }

    #[test]
    fn partial_files_keep_defaults_and_reject_typos() {
        let cfg = Config::parse("[trainer]\nmethod = \"bc\"\nhidden = [64, 64]\n", "t").unwrap();
        assert_eq!(cfg.trainer.hidden, vec![64, 64]);
        assert_eq!(cfg.trainer.expectile, 0.7);
        assert!(matches!(Config::parse("[trainer]\nexpectle = 0.5\n", "t"), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn seed_fans_out() {
        let mut cfg = Config::default();
        cfg.apply_seed(7);
        assert_eq!((cfg.seed, cfg.expert.seed, cfg.trainer.seed), (7, 7, 7));
    }
}
