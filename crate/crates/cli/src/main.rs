//! `fanav` — world generation, expert collection, offline training,
//! evaluation and comparison from one binary.

mod manifest;

use clap::{Args, Parser, Subcommand};
use fanav::config::Config;
use fanav::data::{load_dataset, save_dataset, OfflineDataset};
use fanav::eval::{
    compare, evaluate_suite, export_trajectories, Controller, EvalOptions, EvalResult, ExpertController, PolicyController, TaskSuite,
    ZeroController,
};
use fanav::expert::{CollectMode, Collector};
use fanav::nn::Checkpoint;
use fanav::offrl::{train, Method};
use fanav::pipeline::{self, write_json, write_text};
use fanav::worldgen::{gen_world, WorldGenConfig};
use fanav::{Error, ErrorKind};
use manifest::Manifest;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

pub const EXIT_USAGE: u8 = 2;

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Config => 3,
        ErrorKind::Data => 4,
        ErrorKind::Numeric => 5,
        ErrorKind::Io => 6,
        ErrorKind::Protocol => 7,
    }
}

#[derive(Debug, Parser)]
#[command(name = "fanav", version, about = "Failure-aware offline RL for mapless 2-D navigation")]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Global seed (falls back to FANAV_SEED, then the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded cluttered room.
    GenWorld(GenWorldArgs),
    /// Record expert trajectories into a dataset.
    Collect(CollectArgs),
    /// Dataset utilities.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Train one method on a dataset.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a task suite.
    Eval(EvalArgs),
    /// Build a comparison table from evaluation results.
    Compare(CompareArgs),
    /// Collect, train all methods, evaluate and compare.
    Pipeline(PipelineArgs),
    /// Print the fully resolved configuration.
    ShowConfig,
}

#[derive(Debug, Args)]
struct GenWorldArgs {
    #[arg(long, default_value = "generated")]
    name: String,
    #[arg(long, default_value_t = 10.0)]
    width: f64,
    #[arg(long, default_value_t = 10.0)]
    height: f64,
    /// Obstacle floor coverage in [0, 1].
    #[arg(long, default_value_t = 0.1)]
    density: f64,
    /// Free radius kept by the connectivity probe, metres.
    #[arg(long, default_value_t = 0.3)]
    clearance: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CollectArgs {
    #[arg(long)]
    world: Option<PathBuf>,
    /// Run exactly this many episodes in `--mode` instead of mixing to a ratio.
    #[arg(long, conflicts_with_all = ["target_col_ratio", "transitions"])]
    episodes: Option<usize>,
    #[arg(long, default_value = "clean")]
    mode: CollectMode,
    /// Collision share of transitions when mixing clean and perturbed runs.
    #[arg(long)]
    target_col_ratio: Option<f64>,
    #[arg(long)]
    transitions: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum DatasetCommand {
    /// Print partition sizes and the realized ratio.
    Inspect { path: PathBuf },
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, required_unless_present = "baseline")]
    checkpoint: Option<PathBuf>,
    /// Evaluate a reference controller instead of a checkpoint.
    #[arg(long, conflicts_with = "checkpoint")]
    baseline: Option<Baseline>,
    #[arg(long)]
    world: PathBuf,
    /// Persisted suite; generated from the config and saved when absent.
    #[arg(long)]
    suite: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    tasks: Option<usize>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Baseline {
    Expert,
    Zero,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Directories searched recursively for `result.json`.
    #[arg(long, num_args = 1.., required = true)]
    results: Vec<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long)]
    out_dir: PathBuf,
    /// Number of training seeds.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    steps: Option<u64>,
}

/// Config file, then `FANAV_SEED`, then `--seed`.
fn base_config(cli: &Cli) -> Result<Config, Error> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let env_seed = match std::env::var("FANAV_SEED") {
        Ok(s) => Some(s.trim().parse::<u64>().map_err(|_| fanav::config::ConfigError::Invalid(format!("FANAV_SEED `{s}` is not an integer")))?),
        Err(_) => None,
    };
    if let Some(seed) = cli.seed.or(env_seed) {
        cfg.apply_seed(seed);
    }
    Ok(cfg)
}

fn apply_overrides(cfg: &mut Config, command: &Command) {
    match command {
        Command::Collect(a) => {
            if let Some(w) = &a.world {
                cfg.collect.world = w.clone();
            }
            if let Some(r) = a.target_col_ratio {
                cfg.collect.col_ratio = r;
            }
            if let Some(n) = a.transitions {
                cfg.collect.transitions = n;
            }
        }
        Command::Train(a) => {
            if let Some(m) = a.method {
                cfg.trainer.method = m;
            }
            if let Some(s) = a.steps {
                cfg.trainer.total_steps = s;
            }
        }
        Command::Eval(a) => {
            if let Some(t) = a.trials {
                cfg.eval.trials = t;
            }
            if let Some(t) = a.tasks {
                cfg.eval.tasks = t;
            }
        }
        Command::Pipeline(a) => {
            if let Some(s) = a.seeds {
                cfg.pipeline.seeds = s;
            }
            if let Some(s) = a.steps {
                cfg.trainer.total_steps = s;
            }
        }
        _ => {}
    }
}

fn resolve(cli: &Cli) -> Result<Config, Error> {
    let mut cfg = base_config(cli)?;
    apply_overrides(&mut cfg, &cli.command);
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = resolve(cli)?;
    let argv: Vec<String> = std::env::args().collect();
    match &cli.command {
        Command::GenWorld(a) => cmd_gen_world(&cfg, a, &argv),
        Command::Collect(a) => cmd_collect(&cfg, a, &argv),
        Command::Dataset(DatasetCommand::Inspect { path }) => cmd_inspect(path),
        Command::Train(a) => cmd_train(&cfg, a, &argv),
        Command::Eval(a) => cmd_eval(&cfg, a, &argv),
        Command::Compare(a) => cmd_compare(&cfg, a, &argv),
        Command::Pipeline(a) => cmd_pipeline(&cfg, a, &argv),
        Command::ShowConfig => {
            print!("{}", cfg.to_toml());
            Ok(())
        }
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    path.with_file_name(name)
}

fn ensure_parent(path: &Path) -> Result<(), Error> {
    if let Some(p) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(p)?;
    }
    Ok(())
}

fn cmd_gen_world(cfg: &Config, a: &GenWorldArgs, argv: &[String]) -> Result<(), Error> {
    let gen = WorldGenConfig { name: a.name.clone(), width: a.width, height: a.height, density: a.density, clearance: a.clearance, seed: cfg.seed };
    ensure_parent(&a.out)?;
    let mut m = Manifest::begin(argv, cfg, &[], &[a.out.clone()], &sidecar(&a.out))?;
    let world = gen_world(&gen)?;
    write_text(&a.out, &world.to_text())?;
    m.finish()?;
    println!("wrote {} ({} obstacles)", a.out.display(), world.obstacles.len());
    Ok(())
}

fn cmd_collect(cfg: &Config, a: &CollectArgs, argv: &[String]) -> Result<(), Error> {
    ensure_parent(&a.out)?;
    let mut m = Manifest::begin(argv, cfg, &[cfg.collect.world.clone()], &[a.out.clone()], &sidecar(&a.out))?;
    let world = pipeline::load_world(&cfg.collect.world)?;
    let ds = match a.episodes {
        Some(n) => {
            let collector = Collector::new(&world, cfg.robot, cfg.episode, cfg.expert);
            let mut ds = collector.empty_dataset(pipeline::generation_tag(cfg, &world));
            for traj in collector.collect(n, a.mode, 0)? {
                if traj.outcome().is_some() {
                    ds.push_trajectory(traj.transitions)?;
                }
            }
            ds
        }
        None => pipeline::collect(cfg, &world)?,
    };
    save_dataset(&ds, &a.out)?;
    m.finish()?;
    print_summary(&ds);
    Ok(())
}

fn print_summary(ds: &OfflineDataset) {
    let total = ds.len().max(1) as f64;
    println!("success transitions:   {}", ds.exp.len());
    println!("collision transitions: {}", ds.col.len());
    println!(
        "success:collision ratio {:.2}:{:.2} (collision share {:.4})",
        10.0 * ds.exp.len() as f64 / total,
        10.0 * ds.col.len() as f64 / total,
        ds.collision_fraction()
    );
    let traj = |v: &[fanav::data::Transition]| v.iter().filter(|t| t.done).count();
    println!("trajectories: {} success, {} collision", traj(&ds.exp), traj(&ds.col));
    println!("beams: {}  feature dim: {}", ds.meta.encoder.beam_count, ds.meta.encoder.dim());
}

fn cmd_inspect(path: &Path) -> Result<(), Error> {
    let ds = load_dataset(path)?;
    print_summary(&ds);
    Ok(())
}

fn cmd_train(cfg: &Config, a: &TrainArgs, argv: &[String]) -> Result<(), Error> {
    std::fs::create_dir_all(&a.out_dir)?;
    let mut m = Manifest::begin(argv, cfg, &[a.dataset.clone()], &[a.out_dir.clone()], &a.out_dir.join("manifest.json"))?;
    let ds = load_dataset(&a.dataset)?;
    let (_, report) = train::<f32>(&ds, &cfg.trainer, Some(&a.out_dir))?;
    pipeline::write_train_artifacts(&a.out_dir, &cfg.trainer, cfg, &report)?;
    m.finish()?;
    if let Some(last) = report.epochs.last() {
        println!(
            "{} finished {} steps: L_V {:.4} L_Q {:.4} L_pi {:.4}",
            cfg.trainer.method.label(),
            last.step,
            last.value_loss,
            last.critic_loss,
            last.policy_loss
        );
    }
    println!("policy rows from collision trajectories: {}", report.stats.policy_collision_rows);
    Ok(())
}

fn cmd_eval(cfg: &Config, a: &EvalArgs, argv: &[String]) -> Result<(), Error> {
    std::fs::create_dir_all(&a.out_dir)?;
    let mut inputs: Vec<PathBuf> = a.checkpoint.iter().cloned().collect();
    inputs.push(a.world.clone());
    inputs.extend(a.suite.iter().filter(|p| p.exists()).cloned());
    let mut m = Manifest::begin(argv, cfg, &inputs, &[a.out_dir.clone()], &a.out_dir.join("manifest.json"))?;
    let world = pipeline::load_world(&a.world)?;
    let suite = match &a.suite {
        Some(p) if p.exists() => TaskSuite::load(p).map_err(Error::from)?,
        other => {
            let suite = pipeline::suite_for(cfg, &world)?;
            let path = other.clone().unwrap_or_else(|| a.out_dir.join("suite.suite"));
            suite.save(&path).map_err(Error::from)?;
            suite
        }
    };
    let controller: Box<dyn Controller> = match (&a.checkpoint, a.baseline) {
        (Some(path), _) => Box::new(PolicyController::from_checkpoint(&Checkpoint::<f32>::load(path)?, &cfg.robot)?),
        (None, Some(Baseline::Expert)) => Box::new(ExpertController { cfg: cfg.expert, spec: cfg.robot }),
        (None, _) => Box::new(ZeroController),
    };
    let opts = EvalOptions { trials: cfg.eval.trials, jitter: cfg.eval.jitter, seed: cfg.seed };
    let res = evaluate_suite(controller.as_ref(), &world, &cfg.robot, &suite, &opts)?;
    write_json(&a.out_dir.join("result.json"), &res)?;
    export_trajectories(&res, &world, &a.out_dir.join("trajectories"))?;
    m.finish()?;
    println!(
        "{} in {}: SR {:.2} ± {:.2}  CR {:.2} ± {:.2}  TR {:.2} ± {:.2}",
        res.method, res.world, res.sr.mean, res.sr.std, res.cr.mean, res.cr.std, res.tr.mean, res.tr.std
    );
    Ok(())
}

fn find_results(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), Error> {
    if dir.is_file() {
        out.push(dir.to_path_buf());
        return Ok(());
    }
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            find_results(&p, out)?;
        } else if p.file_name().is_some_and(|n| n == "result.json") {
            out.push(p);
        }
    }
    Ok(())
}

fn cmd_compare(cfg: &Config, a: &CompareArgs, argv: &[String]) -> Result<(), Error> {
    let mut files = Vec::new();
    for d in &a.results {
        find_results(d, &mut files)?;
    }
    let mut m = match &a.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            Some(Manifest::begin(argv, cfg, &files, &[dir.clone()], &dir.join("manifest.json"))?)
        }
        None => None,
    };
    let results = files
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<EvalResult>(&text)
                .map_err(|e| Error::Data(fanav::data::DataError::Format { offset: e.column() as u64, message: format!("{}: {e}", p.display()) }))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let table = compare(&results)?;
    if let Some(dir) = &a.out_dir {
        write_text(&dir.join("comparison.csv"), &table.to_csv())?;
        write_text(&dir.join("comparison.txt"), &table.to_text())?;
    }
    if let Some(m) = m.as_mut() {
        m.finish()?;
    }
    print!("{}", table.to_text());
    Ok(())
}

fn cmd_pipeline(cfg: &Config, a: &PipelineArgs, argv: &[String]) -> Result<(), Error> {
    std::fs::create_dir_all(&a.out_dir)?;
    let mut inputs = vec![cfg.collect.world.clone()];
    inputs.extend(cfg.eval.worlds.iter().cloned());
    let mut m = Manifest::begin(argv, cfg, &inputs, &[a.out_dir.clone()], &a.out_dir.join("manifest.json"))?;
    let out = pipeline::run_pipeline(cfg, &a.out_dir, &mut |line| eprintln!("{line}"))?;
    m.finish()?;
    print!("{}", out.comparison.to_text());
    Ok(())
}
