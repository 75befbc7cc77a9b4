#![allow(dead_code)]

use fanav::sim::World;

pub fn cluttered() -> World {
    World::parse(
        "name toy\nbounds 8 8\nrect 2 2 1 3\nrect 5 1 1 2\ncircle 5.5 5.5 0.8\nrect 3.5 6 2 0.5\ncircle 1.5 6.5 0.4\n",
    )
    .unwrap()
}

use fanav::data::{OfflineDataset, Transition};
use fanav::expert::{Collector, ExpertConfig};
use fanav::offrl::Learner;
use fanav::sim::{EpisodeConfig, RobotSpec};
use std::collections::BTreeMap;

/// Small mixed dataset collected by the scripted expert in [`cluttered`].
pub fn toy_dataset(world: &World, total: usize, col_ratio: f64, seed: u64) -> OfflineDataset {
    let c = Collector::new(world, RobotSpec::default(), EpisodeConfig::default(), ExpertConfig { seed, ..Default::default() });
    c.collect_dataset(total, col_ratio, 0.0, "toy".into()).unwrap()
}

fn mean_value(learner: &Learner<f32>, states: &[&Transition]) -> f64 {
    let flat: Vec<f32> = states.iter().flat_map(|t| t.s.iter().copied()).collect();
    let v = learner.values(&flat, states.len()).unwrap();
    v.iter().map(|&x| x as f64).sum::<f64>() / v.len() as f64
}

/// Mean `V` over near-collision states (collision-trajectory states whose
/// closest beam is within `radius + 0.05`) and over the middle state of
/// each success trajectory.
pub fn value_shaping_means(learner: &Learner<f32>, ds: &OfflineDataset, radius: f64) -> (f64, f64, usize, usize) {
    let enc = &ds.meta.encoder;
    let near: Vec<&Transition> = ds.col.iter().filter(|t| enc.min_range(&t.s) < radius + 0.05).collect();
    let mut by_traj: BTreeMap<u64, Vec<&Transition>> = BTreeMap::new();
    ds.exp.iter().for_each(|t| by_traj.entry(t.traj_id).or_default().push(t));
    let mid: Vec<&Transition> = by_traj.values().map(|v| v[v.len() / 2]).collect();
    assert!(!near.is_empty() && !mid.is_empty(), "toy dataset lacks probe states");
    (mean_value(learner, &near), mean_value(learner, &mid), near.len(), mid.len())
}

// ---- numerical oracles shared by the loss tests and the acceptance target

use fanav::data::Outcome;
use fanav::nn::{Activation, Arch, GaussianPolicy};
use fanav::offrl::expectile_loss_grad;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FD_H: f64 = 1e-4;
pub const FD_TOL: f64 = 1e-4;

/// Central differences on 20 random coordinates of `params`.
pub fn fd_check(params: &[f64], analytic: &[f64], seed: u64, mut loss: impl FnMut(&[f64]) -> f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = params.to_vec();
    for _ in 0..20 {
        let i = rng.gen_range(0..p.len());
        let orig = p[i];
        p[i] = orig + FD_H;
        let up = loss(&p);
        p[i] = orig - FD_H;
        let down = loss(&p);
        p[i] = orig;
        let fd = (up - down) / (2.0 * FD_H);
        let scale = fd.abs().max(analytic[i].abs()).max(1e-6);
        let rel = (fd - analytic[i]).abs() / scale;
        assert!(rel < FD_TOL, "param {i}: fd {fd} vs analytic {} (rel {rel})", analytic[i]);
    }
}

pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<f64> {
    (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn arch(input: usize, out: usize) -> Arch {
    Arch::uniform(input, &[16, 16], out, Activation::Tanh).unwrap()
}

pub fn policy_fixture(seed: u64, n: usize, d: usize) -> (GaussianPolicy<f64>, Vec<f64>, Vec<f64>, Vec<Outcome>, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut policy = GaussianPolicy::<f64>::new(arch(d, 2), [0.5, std::f64::consts::FRAC_PI_2], &mut rng).unwrap();
    // move away from the near-zero initial head so all terms are exercised
    policy.params.iter_mut().for_each(|p| *p += rng.gen_range(-0.3..0.3));
    let states = random_rows(&mut rng, n, d);
    let actions: Vec<f64> = (0..n).flat_map(|_| [rng.gen_range(-0.45..0.45), rng.gen_range(-1.4..1.4)]).collect();
    (policy, states, actions, vec![Outcome::Success; n], rng)
}

/// τ-expectile by bisection on `τ·Σ(x−e)₊ = (1−τ)·Σ(e−x)₊`.
pub fn expectile_bisection(xs: &[f64], tau: f64) -> f64 {
    let f = |e: f64| {
        xs.iter().map(|&x| if x > e { tau * (x - e) } else { -(1.0 - tau) * (e - x) }).sum::<f64>()
    };
    let (mut lo, mut hi) = (xs.iter().cloned().fold(f64::INFINITY, f64::min), xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 { lo = mid } else { hi = mid }
    }
    0.5 * (lo + hi)
}

pub fn fit_scalar_expectile(xs: &[f64], tau: f64) -> f64 {
    let mut v = 0.0;
    for _ in 0..20_000 {
        let u: Vec<f64> = xs.iter().map(|&x| x - v).collect();
        let (_, du) = expectile_loss_grad(&u, tau);
        let dv: f64 = -du.iter().sum::<f64>();
        v -= 0.5 * dv;
    }
    v
}

