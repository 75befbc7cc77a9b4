//! The fuzz seed corpora must stay parseable as the formats evolve.

use fanav::config::Config;
use fanav::data::parse_dataset;
use fanav::eval::TaskSuite;
use fanav::nn::Checkpoint;
use fanav::offrl::CheckpointMeta;
use fanav::sim::World;
use std::path::{Path, PathBuf};

fn seeds(target: &str) -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty(), "no seeds in {}", dir.display());
    files
}

#[test]
fn world_seeds_parse_and_round_trip() {
    for p in seeds("world") {
        let w = World::parse(&std::fs::read_to_string(&p).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert_eq!(World::parse(&w.to_text()).unwrap(), w);
    }
}

#[test]
fn suite_seeds_parse() {
    for p in seeds("suite") {
        let s = TaskSuite::parse(&std::fs::read_to_string(&p).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert_eq!(TaskSuite::parse(&s.to_text()).unwrap(), s);
    }
}

#[test]
fn dataset_seeds_parse() {
    for p in seeds("dataset") {
        let ds = parse_dataset(&std::fs::read(&p).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert!(!ds.is_empty());
    }
}

#[test]
fn checkpoint_seeds_parse() {
    for p in seeds("checkpoint") {
        let ck = Checkpoint::<f32>::from_bytes(&std::fs::read(&p).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        CheckpointMeta::parse(&ck.meta).unwrap();
        assert_eq!(Checkpoint::<f32>::from_bytes(&ck.to_bytes()).unwrap(), ck);
    }
}

#[test]
fn config_seeds_parse() {
    for p in seeds("config") {
        let cfg = Config::parse(&std::fs::read_to_string(&p).unwrap(), &p.display().to_string()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        cfg.validate().unwrap();
    }
}
