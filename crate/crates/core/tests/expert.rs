mod common;

use fanav::data::Outcome;
use fanav::expert::{CollectMode, Collector, ExpertConfig};
use fanav::sim::{EpisodeConfig, RobotSpec, Terminal, World};
use std::collections::HashSet;

fn collector(world: &World, expert: ExpertConfig) -> Collector<'_> {
    Collector::new(world, RobotSpec::default(), EpisodeConfig::default(), expert)
}

#[test]
fn clean_expert_always_succeeds_in_free_space() {
    let world = World::empty("open", 10.0, 10.0).unwrap();
    let c = collector(&world, ExpertConfig::default());
    let trajs = c.collect(40, CollectMode::Clean, 0).unwrap();
    assert!(trajs.iter().all(|t| t.terminal == Terminal::Success), "{:?}", trajs.iter().map(|t| t.terminal).collect::<Vec<_>>());
    assert!(trajs.iter().all(|t| t.outcome() == Some(Outcome::Success)));
}

#[test]
fn zero_probability_perturbation_is_clean() {
    let world = common::cluttered();
    let c = collector(&world, ExpertConfig { noise_prob: 0.0, seed: 5, ..Default::default() });
    let clean = c.collect(8, CollectMode::Clean, 0).unwrap();
    let pert = c.collect(8, CollectMode::Perturbed, 0).unwrap();
    assert_eq!(clean, pert);
}

#[test]
fn actions_respect_robot_limits() {
    let world = common::cluttered();
    let spec = RobotSpec::default();
    let c = collector(&world, ExpertConfig { noise_prob: 1.0, ..Default::default() });
    for traj in c.collect(8, CollectMode::Perturbed, 0).unwrap() {
        for tr in &traj.transitions {
            assert!((tr.a[0] as f64).abs() <= spec.v_max + 1e-6);
            assert!((tr.a[1] as f64).abs() <= spec.omega_max + 1e-6);
        }
    }
}

#[test]
fn mixed_collection_hits_the_ratio_with_pure_labels() {
    let world = common::cluttered();
    let c = collector(&world, ExpertConfig { seed: 11, ..Default::default() });
    let ds = c.collect_dataset(3000, 0.1, 0.5, "test".into()).unwrap();
    let frac = ds.collision_fraction();
    // Whole trajectories are kept, so the ratio overshoots by at most one episode per side.
    assert!((frac - 0.1).abs() < 0.03, "collision fraction {frac}");
    assert!(ds.exp.iter().all(|t| t.outcome == Outcome::Success));
    assert!(ds.col.iter().all(|t| t.outcome == Outcome::Collision));
    let exp_ids: HashSet<u64> = ds.exp.iter().map(|t| t.traj_id).collect();
    let col_ids: HashSet<u64> = ds.col.iter().map(|t| t.traj_id).collect();
    assert!(exp_ids.is_disjoint(&col_ids));
    ds.validate(1e-4).unwrap();
}

#[test]
fn seeded_collection_is_reproducible() {
    let world = common::cluttered();
    let c = collector(&world, ExpertConfig { seed: 3, ..Default::default() });
    let a = c.collect_dataset(600, 0.1, 0.5, String::new()).unwrap();
    let b = c.collect_dataset(600, 0.1, 0.5, String::new()).unwrap();
    assert_eq!(a.exp, b.exp);
    assert_eq!(a.col, b.col);
    let other = collector(&world, ExpertConfig { seed: 4, ..Default::default() }).collect_dataset(600, 0.1, 0.5, String::new()).unwrap();
    assert_ne!(a.exp, other.exp);
}

#[test]
fn impossible_world_is_a_config_error() {
    let world = World::empty("tiny", 2.0, 2.0).unwrap();
    let c = collector(&world, ExpertConfig::default());
    assert!(c.run_episode(CollectMode::Clean, 0).is_err());
}

#[test]
fn clean_share_splits_the_success_quota() {
    let world = common::cluttered();
    let c = collector(&world, ExpertConfig { seed: 5, ..Default::default() });
    // perturbed episode indices start at 2^40
    let perturbed = |ds: &fanav::data::OfflineDataset| ds.exp.iter().filter(|t| t.traj_id >= 1 << 40).count();
    let all_clean = c.collect_dataset(1000, 0.1, 1.0, String::new()).unwrap();
    assert_eq!(perturbed(&all_clean), 0);
    let none_clean = c.collect_dataset(1000, 0.1, 0.0, String::new()).unwrap();
    assert_eq!(perturbed(&none_clean), none_clean.exp.len());
    let half = c.collect_dataset(2000, 0.1, 0.5, String::new()).unwrap();
    let share = perturbed(&half) as f64 / half.exp.len() as f64;
    assert!((0.35..0.65).contains(&share), "perturbed share {share}");
    assert!(c.collect_dataset(1000, 0.1, 1.5, String::new()).is_err());
}
