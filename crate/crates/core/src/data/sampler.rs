use super::{DataError, OfflineDataset, Transition};
use crate::rng::{domain, stream};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Exp,
    Col,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BatchIndex {
    pub source: Source,
    pub index: usize,
}

impl BatchIndex {
    pub fn get<'a>(&self, ds: &'a OfflineDataset) -> &'a Transition {
        match self.source {
            Source::Exp => &ds.exp[self.index],
            Source::Col => &ds.col[self.index],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Fraction of each critic batch drawn from the collision partition.
    pub rho: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), DataError> {
        if !(0.0..1.0).contains(&self.rho) || self.batch_size == 0 {
            return Err(DataError::Config(format!("rho must be in [0, 1) and batch size ≥ 1, got {self:?}")));
        }
        Ok(())
    }
}

/// Collision sub-batch size `round(ρ·B)`, halves rounding up.
pub fn collision_count(rho: f64, batch_size: usize) -> usize {
    (rho * batch_size as f64 + 0.5).floor() as usize
}

/// Stratified batch: exactly `round(ρB)` collision draws, the rest from
/// the success partition, shuffled together. Draws are with replacement.
pub fn sample_mixed(ds: &OfflineDataset, cfg: &SamplerConfig, call: u64) -> Result<Vec<BatchIndex>, DataError> {
    cfg.validate()?;
    let n_col = collision_count(cfg.rho, cfg.batch_size).min(cfg.batch_size);
    let n_exp = cfg.batch_size - n_col;
    if n_col > 0 && ds.col.is_empty() {
        return Err(DataError::Config("collision ratio > 0 but the collision partition is empty".into()));
    }
    if n_exp > 0 && ds.exp.is_empty() {
        return Err(DataError::Config("success partition is empty".into()));
    }
    let mut rng = stream(cfg.seed, domain::MIXED_BATCH, call);
    let mut batch = Vec::with_capacity(cfg.batch_size);
    for _ in 0..n_col {
        batch.push(BatchIndex { source: Source::Col, index: rng.gen_range(0..ds.col.len()) });
    }
    for _ in 0..n_exp {
        batch.push(BatchIndex { source: Source::Exp, index: rng.gen_range(0..ds.exp.len()) });
    }
    batch.shuffle(&mut rng);
    Ok(batch)
}

/// Uniform batch from the success partition only.
pub fn sample_exp(ds: &OfflineDataset, batch_size: usize, seed: u64, call: u64) -> Result<Vec<BatchIndex>, DataError> {
    if ds.exp.is_empty() {
        return Err(DataError::Config("success partition is empty".into()));
    }
    let mut rng = stream(seed, domain::EXP_BATCH, call);
    Ok((0..batch_size)
        .map(|_| BatchIndex { source: Source::Exp, index: rng.gen_range(0..ds.exp.len()) })
        .collect())
}

/// Uniform batch from the union of both partitions, no stratification.
pub fn sample_pooled(ds: &OfflineDataset, batch_size: usize, seed: u64, domain_tag: u64, call: u64) -> Result<Vec<BatchIndex>, DataError> {
    let total = ds.len();
    if total == 0 {
        return Err(DataError::Config("dataset is empty".into()));
    }
    let mut rng = stream(seed, domain::POOLED_BATCH ^ domain_tag, call);
    Ok((0..batch_size)
        .map(|_| {
            let i = rng.gen_range(0..total);
            if i < ds.exp.len() {
                BatchIndex { source: Source::Exp, index: i }
            } else {
                BatchIndex { source: Source::Col, index: i - ds.exp.len() }
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DatasetMeta, Outcome, StateEncoder};
    use crate::sim::{EpisodeConfig, RobotSpec};

    pub(crate) fn synthetic(n_exp: usize, n_col: usize) -> OfflineDataset {
        let spec = RobotSpec { lidar_beam_count: 1, ..Default::default() };
        let meta = DatasetMeta { encoder: StateEncoder::new(&spec, 1.0), episode: EpisodeConfig::default(), generation: String::new() };
        let mut ds = OfflineDataset::new(meta);
        let mk = |i: usize, outcome| Transition {
            s: vec![i as f32; 5],
            a: [0.0, 0.0],
            r: 0.0,
            s_next: vec![0.0; 5],
            done: true,
            outcome,
            traj_id: i as u64,
            t: 0,
        };
        ds.exp = (0..n_exp).map(|i| mk(i, Outcome::Success)).collect();
        ds.col = (0..n_col).map(|i| mk(n_exp + i, Outcome::Collision)).collect();
        ds
    }

    #[test]
    fn rounding_rule() {
        assert_eq!(collision_count(0.015, 256), 4);
        assert_eq!(collision_count(0.5, 100), 50);
        assert_eq!(collision_count(0.0, 256), 0);
        assert_eq!(collision_count(0.125, 4), 1); // 0.5 rounds up
    }

    #[test]
    fn exact_stratification() {
        let ds = synthetic(50, 7);
        for (rho, b, want) in [(0.015, 256, 4), (0.0, 64, 0), (0.5, 100, 50)] {
            let cfg = SamplerConfig { rho, batch_size: b, seed: 3 };
            for call in 0..20 {
                let batch = sample_mixed(&ds, &cfg, call).unwrap();
                assert_eq!(batch.len(), b);
                assert_eq!(batch.iter().filter(|i| i.source == Source::Col).count(), want);
            }
        }
    }

    #[test]
    fn deterministic_per_call_index() {
        let ds = synthetic(30, 30);
        let cfg = SamplerConfig { rho: 0.3, batch_size: 32, seed: 11 };
        assert_eq!(sample_mixed(&ds, &cfg, 5).unwrap(), sample_mixed(&ds, &cfg, 5).unwrap());
        assert_ne!(sample_mixed(&ds, &cfg, 5).unwrap(), sample_mixed(&ds, &cfg, 6).unwrap());
        assert_eq!(sample_exp(&ds, 16, 1, 2).unwrap(), sample_exp(&ds, 16, 1, 2).unwrap());
    }

    #[test]
    fn exp_sampler_is_pure() {
        let ds = synthetic(20, 20);
        for call in 0..50 {
            let b = sample_exp(&ds, 256, 9, call).unwrap();
            assert_eq!(b.len(), 256);
            assert!(b.iter().all(|i| i.get(&ds).outcome == Outcome::Success));
        }
    }

    fn chi_square(counts: &[usize]) -> f64 {
        let n: usize = counts.iter().sum();
        let e = n as f64 / counts.len() as f64;
        counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
    }

    // upper 0.1% points of chi-square with 19 and 9 degrees of freedom
    const CHI2_19: f64 = 43.82;
    const CHI2_9: f64 = 27.88;

    #[test]
    fn draws_are_uniform_within_each_partition() {
        let ds = synthetic(20, 10);
        let cfg = SamplerConfig { rho: 0.25, batch_size: 64, seed: 21 };
        let (mut exp, mut col) = (vec![0usize; 20], vec![0usize; 10]);
        for call in 0..500 {
            for i in sample_mixed(&ds, &cfg, call).unwrap() {
                match i.source {
                    Source::Exp => exp[i.index] += 1,
                    Source::Col => col[i.index] += 1,
                }
            }
        }
        assert!(chi_square(&exp) < CHI2_19, "exp {}", chi_square(&exp));
        assert!(chi_square(&col) < CHI2_9, "col {}", chi_square(&col));

        let mut pure = vec![0usize; 20];
        (0..300).flat_map(|c| sample_exp(&ds, 64, 4, c).unwrap()).for_each(|i| pure[i.index] += 1);
        assert!(chi_square(&pure) < CHI2_19);

        // pooled: all 30 rows equally likely regardless of partition
        let ds = synthetic(20, 10);
        let mut all = vec![0usize; 30];
        for i in (0..300).flat_map(|c| sample_pooled(&ds, 64, 5, 1, c).unwrap()) {
            all[if i.source == Source::Exp { i.index } else { 20 + i.index }] += 1;
        }
        let pooled_exp: usize = all[..20].iter().sum();
        assert!((pooled_exp as f64 / (300.0 * 64.0) - 2.0 / 3.0).abs() < 0.02);
        assert!(chi_square(&all[..20]) < CHI2_19 && chi_square(&all[20..]) < CHI2_9);
    }

    #[test]
    fn configuration_errors() {
        let ds = synthetic(10, 0);
        let cfg = SamplerConfig { rho: 0.1, batch_size: 64, seed: 0 };
        assert!(matches!(sample_mixed(&ds, &cfg, 0), Err(DataError::Config(_))));
        let cfg = SamplerConfig { rho: 1.0, batch_size: 64, seed: 0 };
        assert!(sample_mixed(&ds, &cfg, 0).is_err());
        assert!(sample_exp(&synthetic(0, 3), 4, 0, 0).is_err());
    }
}
