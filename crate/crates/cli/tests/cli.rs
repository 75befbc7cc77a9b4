use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fanav(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fanav")).args(args).current_dir(cwd).env_remove("FANAV_SEED").output().expect("spawn fanav")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = fanav(args, cwd);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Two small generated worlds plus a matching tiny config.
fn fixture(dir: &Path) -> PathBuf {
    ok(&["--seed", "1", "gen-world", "--name", "open", "--width", "6", "--height", "6", "--density", "0", "--out", "w/open.world"], dir);
    ok(&["--seed", "2", "gen-world", "--name", "rocks", "--width", "7", "--height", "7", "--density", "0.08", "--out", "w/rocks.world"], dir);
    let cfg = dir.join("tiny.toml");
    std::fs::write(
        &cfg,
        r#"seed = 3

[collect]
world = "w/rocks.world"
transitions = 600
col_ratio = 0.1

[trainer]
hidden = [16, 16]
batch_size = 64
total_steps = 60
steps_per_epoch = 20
eval_every = 60

[eval]
worlds = ["w/open.world", "w/rocks.world"]
tasks = 3
trials = 2
max_path = 8.0

[pipeline]
seeds = 1
"#,
    )
    .unwrap();
    cfg
}

#[test]
fn help_on_every_subcommand_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    for sub in [&["--help"][..], &["gen-world", "--help"], &["collect", "--help"], &["dataset", "--help"], &["dataset", "inspect", "--help"], &["train", "--help"], &["eval", "--help"], &["compare", "--help"], &["pipeline", "--help"], &["show-config", "--help"]] {
        let out = fanav(sub, dir.path());
        assert_eq!(code(&out), 0, "{sub:?}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"), "{sub:?}");
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&fanav(&["train", "--bogus"], dir.path())), 2);
    assert_eq!(code(&fanav(&["no-such-command"], dir.path())), 2);
    assert_eq!(code(&fanav(&["collect", "--world", "w", "--episodes", "3", "--transitions", "10", "--out", "x"], dir.path())), 2);
}

#[test]
fn missing_and_invalid_inputs_map_to_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&fanav(&["dataset", "inspect", "nope.fanav"], p)), 6);
    std::fs::write(p.join("junk.fanav"), b"not a dataset").unwrap();
    assert_eq!(code(&fanav(&["dataset", "inspect", "junk.fanav"], p)), 4);
    std::fs::write(p.join("bad.toml"), "[trainer]\nexpectile = 1.5\n").unwrap();
    assert_eq!(code(&fanav(&["--config", "bad.toml", "show-config"], p)), 3);
    std::fs::write(p.join("typo.toml"), "[trainer]\nexpectil = 0.5\n").unwrap();
    assert_eq!(code(&fanav(&["--config", "typo.toml", "show-config"], p)), 3);
}

#[test]
fn gen_world_is_reproducible_and_writes_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for out in ["a.world", "b.world"] {
        ok(&["--seed", "4", "gen-world", "--width", "8", "--height", "8", "--density", "0.1", "--out", out], p);
    }
    assert_eq!(std::fs::read(p.join("a.world")).unwrap(), std::fs::read(p.join("b.world")).unwrap());
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join("a.world.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 4);
    assert_eq!(m["status"], "complete");
    assert!(m["config_digest"].as_str().unwrap().len() == 64);
}

#[test]
fn iql_ca_without_collision_data_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fixture(p);
    ok(&["collect", "--world", "w/open.world", "--episodes", "6", "--mode", "clean", "--out", "clean.fanav"], p);
    let summary = ok(&["dataset", "inspect", "clean.fanav"], p);
    assert!(summary.contains("collision transitions: 0"), "{summary}");

    let out = fanav(&["train", "--method", "iql_ca", "--dataset", "clean.fanav", "--steps", "10", "--out-dir", "ca"], p);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    ok(&["train", "--method", "iql_so", "--dataset", "clean.fanav", "--steps", "10", "--out-dir", "so"], p);
    for f in ["manifest.json", "report.csv", "config.echo", "report.json", "checkpoint_0000010.famlp"] {
        assert!(p.join("so").join(f).exists(), "{f}");
    }
}

#[test]
fn train_then_eval_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let cfg = fixture(p);
    let cfg = cfg.to_str().unwrap();
    ok(&["--config", cfg, "collect", "--out", "mixed.fanav"], p);
    ok(&["--config", cfg, "train", "--method", "bc", "--dataset", "mixed.fanav", "--out-dir", "bc"], p);
    let line = ok(
        &["--config", cfg, "eval", "--checkpoint", "bc/checkpoint_0000060.famlp", "--world", "w/rocks.world", "--suite", "rocks.suite", "--out-dir", "bc/eval"],
        p,
    );
    assert!(line.starts_with("BC in rocks"), "{line}");
    ok(&["--config", cfg, "eval", "--baseline", "zero", "--world", "w/rocks.world", "--suite", "rocks.suite", "--out-dir", "zero"], p);
    assert_eq!(std::fs::read_dir(p.join("zero/trajectories")).unwrap().count(), 3 + 1);
    let table = ok(&["compare", "--results", "bc/eval", "zero", "--out-dir", "table"], p);
    assert!(table.contains("BC") && table.contains("Zero"));
    assert!(p.join("table/comparison.csv").exists() && p.join("table/manifest.json").exists());
}

#[test]
fn pipeline_twice_gives_identical_comparisons() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let cfg = fixture(p);
    let cfg = cfg.to_str().unwrap();
    ok(&["--config", cfg, "--seed", "7", "pipeline", "--out-dir", "run1"], p);
    ok(&["--config", cfg, "--seed", "7", "pipeline", "--out-dir", "run2"], p);
    let a = std::fs::read_to_string(p.join("run1/comparison.csv")).unwrap();
    assert_eq!(a, std::fs::read_to_string(p.join("run2/comparison.csv")).unwrap());
    assert_eq!(a.lines().count(), 1 + 4 * 3, "header plus 4 methods × (2 worlds + overall)");
    assert_eq!(std::fs::read(p.join("run1/dataset.fanav")).unwrap(), std::fs::read(p.join("run2/dataset.fanav")).unwrap());
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join("run1/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 7);
    assert!(m["inputs"].as_array().unwrap().iter().all(|i| i["sha256"].as_str().unwrap().len() == 64));
    assert!(p.join("run1/runs/iql_ca_seed7/report.json").exists());
}
