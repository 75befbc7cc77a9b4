//! End-to-end driver: collect → train every method and seed → evaluate on
//! fixed suites → compare. Every stage writes its artifacts under one
//! output directory.

use crate::config::Config;
use crate::data::{save_dataset, OfflineDataset};
use crate::eval::{compare, evaluate_suite, export_trajectories, generate_suite, Comparison, EvalOptions, EvalResult, PolicyController, TaskSuite};
use crate::expert::Collector;
use crate::offrl::{train, Method, TrainReport, TrainerConfig};
use crate::sim::World;
use crate::Error;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub fn load_world(path: &Path) -> Result<World, Error> {
    Ok(World::load(path)?)
}

/// Suite for `world` derived from the global seed and the world name, so
/// adding or reordering worlds leaves existing suites unchanged.
pub fn suite_for(cfg: &Config, world: &World) -> Result<TaskSuite, Error> {
    let salt = world.name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    let clearance = cfg.robot.radius + cfg.expert.inflation;
    Ok(generate_suite(world, cfg.episode, cfg.eval.tasks, clearance, Some(cfg.eval.max_path), cfg.seed ^ salt)?)
}

pub fn generation_tag(cfg: &Config, world: &World) -> String {
    #[derive(Serialize)]
    struct Tag<'a> {
        world: &'a str,
        collect: &'a crate::config::CollectConfig,
        expert: &'a crate::expert::ExpertConfig,
        robot: &'a crate::sim::RobotSpec,
    }
    serde_json::to_string(&Tag { world: &world.name, collect: &cfg.collect, expert: &cfg.expert, robot: &cfg.robot }).expect("tag serializes")
}

pub fn collect(cfg: &Config, world: &World) -> Result<OfflineDataset, Error> {
    let collector = Collector::new(world, cfg.robot, cfg.episode, cfg.expert);
    Ok(collector.collect_dataset(cfg.collect.transitions, cfg.collect.col_ratio, cfg.collect.clean_share, generation_tag(cfg, world))?)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    write_text(path, &serde_json::to_string_pretty(value).expect("serializable"))
}

/// Writes `report.csv`, `config.echo` and `report.json` next to the checkpoints.
pub fn write_train_artifacts(dir: &Path, trainer: &TrainerConfig, full: &Config, report: &TrainReport) -> Result<(), Error> {
    write_text(&dir.join("report.csv"), &report.to_csv())?;
    let echo = Config { trainer: trainer.clone(), ..full.clone() };
    write_text(&dir.join("config.echo"), &echo.to_toml())?;
    write_json(&dir.join("report.json"), report)
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub method: Method,
    pub seed: u64,
    pub report: TrainReport,
    pub results: Vec<EvalResult>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub dataset: PathBuf,
    pub runs: Vec<RunRecord>,
    pub comparison: Comparison,
}

impl PipelineOutput {
    pub fn results(&self) -> Vec<EvalResult> {
        self.runs.iter().flat_map(|r| r.results.iter().cloned()).collect()
    }
}

/// Runs the whole pipeline; `log` receives one line per finished stage.
pub fn run_pipeline(cfg: &Config, out: &Path, log: &mut dyn FnMut(&str)) -> Result<PipelineOutput, Error> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let collect_world = load_world(&cfg.collect.world)?;
    let ds = collect(cfg, &collect_world)?;
    let dataset = out.join("dataset.fanav");
    save_dataset(&ds, &dataset)?;
    log(&format!("collected {} success + {} collision transitions in {}", ds.exp.len(), ds.col.len(), collect_world.name));

    let worlds = cfg.eval.worlds.iter().map(|p| load_world(p)).collect::<Result<Vec<_>, _>>()?;
    let suites_dir = out.join("suites");
    std::fs::create_dir_all(&suites_dir)?;
    let mut suites = Vec::with_capacity(worlds.len());
    for w in &worlds {
        let suite = suite_for(cfg, w)?;
        suite.save(&suites_dir.join(format!("{}.suite", w.name)))?;
        write_text(&suites_dir.join(format!("{}.world", w.name)), &w.to_text())?;
        suites.push(suite);
    }

    let opts = EvalOptions { trials: cfg.eval.trials, jitter: cfg.eval.jitter, seed: cfg.seed };
    let mut runs = Vec::new();
    for &method in &cfg.pipeline.methods {
        for k in 0..cfg.pipeline.seeds as u64 {
            let seed = cfg.trainer.seed.wrapping_add(k);
            let tcfg = TrainerConfig { method, seed, ..cfg.trainer.clone() };
            let run_dir = out.join("runs").join(format!("{}_seed{seed}", method.as_str()));
            std::fs::create_dir_all(&run_dir)?;
            let (learner, report) = train::<f32>(&ds, &tcfg, Some(&run_dir))?;
            write_train_artifacts(&run_dir, &tcfg, cfg, &report)?;
            let controller = PolicyController::new(method.label(), learner.policy.clone(), ds.meta.encoder)?;
            let mut results = Vec::with_capacity(worlds.len());
            for (w, suite) in worlds.iter().zip(&suites) {
                let res = evaluate_suite(&controller, w, &cfg.robot, suite, &opts)?;
                let eval_dir = run_dir.join("eval").join(&w.name);
                std::fs::create_dir_all(&eval_dir)?;
                write_json(&eval_dir.join("result.json"), &res)?;
                if k == 0 {
                    export_trajectories(&res, w, &eval_dir.join("trajectories"))?;
                }
                log(&format!(
                    "{} seed {seed} {}: SR {:.1} CR {:.1} TR {:.1}",
                    method.label(),
                    w.name,
                    res.sr.mean,
                    res.cr.mean,
                    res.tr.mean
                ));
                results.push(res);
            }
            runs.push(RunRecord { method, seed, report, results });
        }
    }
    let all: Vec<EvalResult> = runs.iter().flat_map(|r| r.results.iter().cloned()).collect();
    let comparison = compare(&all)?;
    write_text(&out.join("comparison.csv"), &comparison.to_csv())?;
    write_text(&out.join("comparison.txt"), &comparison.to_text())?;
    Ok(PipelineOutput { dataset, runs, comparison })
}
