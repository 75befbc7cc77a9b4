use super::losses::{
    advantage_weights, awr_objective, bc_objective, critic_objective, value_objective, weighted_policy_objective,
    PolicyBatch, TdTargets,
};
use super::{Method, OffrlError, TrainerConfig};
use crate::data::{
    sample_exp, sample_mixed, sample_pooled, BatchIndex, OfflineDataset, Outcome, SamplerConfig, StateEncoder,
};
use crate::nn::{soft_update, AdamState, Arch, Checkpoint, GaussianPolicy, Mlp, NetKind, NetRecord, NnError, Scalar};
use crate::rng::{domain, stream};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Dense, network-ready copy of a sampled batch.
#[derive(Debug, Clone)]
pub struct Batch<T> {
    pub len: usize,
    pub states: Vec<T>,
    pub next_states: Vec<T>,
    /// `[s ∥ a/scale]` rows for the critics.
    pub state_actions: Vec<T>,
    pub actions: Vec<T>,
    pub rewards: Vec<T>,
    pub not_done: Vec<T>,
    pub labels: Vec<Outcome>,
}

impl<T: Scalar> Batch<T> {
    pub fn gather(ds: &OfflineDataset, idx: &[BatchIndex]) -> Self {
        let enc = &ds.meta.encoder;
        let dim = enc.dim();
        let n = idx.len();
        let mut b = Batch {
            len: n,
            states: Vec::with_capacity(n * dim),
            next_states: Vec::with_capacity(n * dim),
            state_actions: Vec::with_capacity(n * (dim + 2)),
            actions: Vec::with_capacity(2 * n),
            rewards: Vec::with_capacity(n),
            not_done: Vec::with_capacity(n),
            labels: Vec::with_capacity(n),
        };
        for i in idx {
            let tr = i.get(ds);
            b.states.extend(tr.s.iter().map(|&v| T::of(v as f64)));
            b.next_states.extend(tr.s_next.iter().map(|&v| T::of(v as f64)));
            b.state_actions.extend(tr.s.iter().map(|&v| T::of(v as f64)));
            b.state_actions.extend(normalized_action(enc, tr.a).map(T::of));
            b.actions.extend(tr.a.iter().map(|&v| T::of(v as f64)));
            b.rewards.push(T::of(tr.r as f64));
            b.not_done.push(if tr.done { T::zero() } else { T::one() });
            b.labels.push(tr.outcome);
        }
        b
    }

    pub fn policy_view(&self) -> PolicyBatch<'_, T> {
        PolicyBatch { states: &self.states, actions: &self.actions, labels: &self.labels }
    }

    pub fn collision_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == Outcome::Collision).count()
    }
}

pub fn normalized_action(enc: &StateEncoder, a: [f32; 2]) -> [f64; 2] {
    [a[0] as f64 / enc.v_max, a[1] as f64 / enc.omega_max]
}

/// All learnable state of one run.
#[derive(Debug, Clone)]
pub struct Learner<T> {
    pub cfg: TrainerConfig,
    pub encoder: StateEncoder,
    pub value: Mlp<T>,
    pub critics: [Mlp<T>; 2],
    pub targets: [Mlp<T>; 2],
    pub policy: GaussianPolicy<T>,
    pub adam_value: AdamState<T>,
    pub adam_critics: [AdamState<T>; 2],
    pub adam_policy: AdamState<T>,
    pub step: u64,
    pub stats: RunStats,
}

/// Audit counters accumulated over a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    /// Collision-labeled rows that entered the policy objective.
    pub policy_collision_rows: u64,
    pub critic_batches: u64,
    pub critic_collision_min: Option<usize>,
    pub critic_collision_max: Option<usize>,
    pub max_weight: f64,
}

/// Per-step scalars.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepLosses {
    pub value: f64,
    pub critic: f64,
    pub policy: f64,
    pub value_grad_norm: f64,
    pub critic_grad_norm: f64,
    pub policy_grad_norm: f64,
    pub critic_collisions: usize,
}

fn norm<T: Scalar>(g: &[T]) -> f64 {
    g.iter().map(|v| v.f64() * v.f64()).sum::<f64>().sqrt()
}

fn check(step: u64, loss: &'static str, value: f64) -> Result<(), OffrlError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(OffrlError::NonFinite { step, loss })
    }
}

impl<T: Scalar> Learner<T> {
    pub fn new(cfg: TrainerConfig, encoder: StateEncoder) -> Result<Self, OffrlError> {
        cfg.validate()?;
        let dim = encoder.dim();
        let value_arch = Arch::uniform(dim, &cfg.hidden, 1, cfg.activation)?;
        let critic_arch = Arch::uniform(dim + 2, &cfg.hidden, 1, cfg.activation)?;
        let policy_arch = Arch::uniform(dim, &cfg.hidden, 2, cfg.activation)?;
        let rng = |k| stream(cfg.seed, domain::INIT, k);
        let value = Mlp::new(value_arch, &mut rng(0));
        let critics = [Mlp::new(critic_arch.clone(), &mut rng(1)), Mlp::new(critic_arch, &mut rng(2))];
        let targets = critics.clone();
        let policy = GaussianPolicy::new(policy_arch, [encoder.v_max, encoder.omega_max], &mut rng(3))?;
        Ok(Self {
            adam_value: AdamState::new(value.params.len(), cfg.lr_value),
            adam_critics: [
                AdamState::new(critics[0].params.len(), cfg.lr_critic),
                AdamState::new(critics[1].params.len(), cfg.lr_critic),
            ],
            adam_policy: AdamState::new(policy.params.len(), cfg.lr_actor),
            cfg,
            encoder,
            value,
            critics,
            targets,
            policy,
            step: 0,
            stats: RunStats::default(),
        })
    }

    /// Elementwise minimum over the two target critics.
    pub fn target_q(&self, state_actions: &[T], n: usize) -> Result<Vec<T>, NnError> {
        let a = self.targets[0].forward(state_actions, n)?;
        let b = self.targets[1].forward(state_actions, n)?;
        Ok(a.into_iter().zip(b).map(|(x, y)| x.min(y)).collect())
    }

    pub fn values(&self, states: &[T], n: usize) -> Result<Vec<T>, NnError> {
        self.value.forward(states, n)
    }

    /// `A = min Q̂(s,a) − V(s)` for a gathered batch.
    pub fn advantages(&self, batch: &Batch<T>) -> Result<Vec<T>, NnError> {
        let q = self.target_q(&batch.state_actions, batch.len)?;
        let v = self.values(&batch.states, batch.len)?;
        Ok(q.into_iter().zip(v).map(|(q, v)| q - v).collect())
    }

    fn critic_indices(&self, ds: &OfflineDataset) -> Result<Vec<BatchIndex>, OffrlError> {
        let cfg = &self.cfg;
        Ok(match cfg.method {
            Method::IqlCa | Method::IqlSo => {
                let rho = if cfg.method == Method::IqlCa { cfg.collision_ratio } else { 0.0 };
                sample_mixed(ds, &SamplerConfig { rho, batch_size: cfg.batch_size, seed: cfg.seed }, self.step)?
            }
            Method::IqlDm => sample_pooled(ds, cfg.batch_size, cfg.seed, 1, self.step)?,
            Method::Bc => Vec::new(),
        })
    }

    fn policy_indices(&self, ds: &OfflineDataset) -> Result<Vec<BatchIndex>, OffrlError> {
        Ok(match self.cfg.method {
            Method::IqlDm => sample_pooled(ds, self.cfg.batch_size, self.cfg.seed, 2, self.step)?,
            _ => sample_exp(ds, self.cfg.batch_size, self.cfg.seed, self.step)?,
        })
    }

    /// One iteration: V, then Q, then targets, then the policy.
    pub fn train_step(&mut self, ds: &OfflineDataset) -> Result<StepLosses, OffrlError> {
        let step = self.step;
        let ctx = |e: OffrlError| match e {
            OffrlError::Nn(NnError::NonFinite { layer }) => OffrlError::NonFiniteLayer { step, layer },
            other => other,
        };
        let mut out = StepLosses::default();
        if self.cfg.method != Method::Bc {
            let idx = self.critic_indices(ds)?;
            let batch = Batch::<T>::gather(ds, &idx);
            out.critic_collisions = batch.collision_count();
            let s = &mut self.stats;
            s.critic_batches += 1;
            s.critic_collision_min = Some(s.critic_collision_min.map_or(out.critic_collisions, |m| m.min(out.critic_collisions)));
            s.critic_collision_max = Some(s.critic_collision_max.map_or(out.critic_collisions, |m| m.max(out.critic_collisions)));

            let q_hat = self.target_q(&batch.state_actions, batch.len).map_err(OffrlError::from).map_err(ctx)?;
            let (lv, gv) = value_objective(&self.value, &batch.states, &q_hat, self.cfg.expectile).map_err(ctx)?;
            check(step, "value", lv.f64())?;
            self.adam_value.step(&mut self.value.params, &gv)?;
            out.value = lv.f64();
            out.value_grad_norm = norm(&gv);

            let v_next = self.values(&batch.next_states, batch.len).map_err(OffrlError::from).map_err(ctx)?;
            let td = TdTargets { rewards: &batch.rewards, not_done: &batch.not_done, v_next: &v_next, gamma: self.cfg.gamma };
            let mut grad_sq = 0.0;
            for k in 0..2 {
                let (lq, gq) = critic_objective(&self.critics[k], &batch.state_actions, &td).map_err(ctx)?;
                check(step, "critic", lq.f64())?;
                self.adam_critics[k].step(&mut self.critics[k].params, &gq)?;
                out.critic += lq.f64();
                grad_sq += norm(&gq).powi(2);
            }
            out.critic_grad_norm = grad_sq.sqrt();
            for k in 0..2 {
                soft_update(&mut self.targets[k].params, &self.critics[k].params, self.cfg.target_update)?;
            }
        }

        let idx = self.policy_indices(ds)?;
        let batch = Batch::<T>::gather(ds, &idx);
        let view = batch.policy_view();
        self.stats.policy_collision_rows += view.collision_count() as u64;
        let (lp, gp) = match self.cfg.method {
            Method::Bc => {
                self.stats.max_weight = self.stats.max_weight.max(1.0);
                bc_objective(&self.policy, &view)
            }
            method => {
                let adv = self.advantages(&batch).map_err(OffrlError::from).map_err(ctx)?;
                let w = advantage_weights(&adv, self.cfg.temperature, self.cfg.max_weight);
                let w_max = w.iter().fold(0.0f64, |m, x| m.max(x.f64()));
                self.stats.max_weight = self.stats.max_weight.max(w_max);
                if method == Method::IqlDm {
                    weighted_policy_objective(&self.policy, &view, &w)
                } else {
                    awr_objective(&self.policy, &view, &adv, self.cfg.temperature, self.cfg.max_weight)
                }
            }
        }
        .map_err(ctx)?;
        check(step, "policy", lp.f64())?;
        self.adam_policy.step(&mut self.policy.params, &gp)?;
        out.policy = lp.f64();
        out.policy_grad_norm = norm(&gp);
        self.step += 1;
        Ok(out)
    }

    /// SHA-256 over every parameter vector in a fixed order.
    pub fn params_digest(&self) -> String {
        let mut h = Sha256::new();
        let mut buf = Vec::new();
        for p in [&self.value.params, &self.critics[0].params, &self.critics[1].params, &self.targets[0].params, &self.targets[1].params, &self.policy.params] {
            buf.clear();
            p.iter().for_each(|v| v.write_le(&mut buf));
            h.update(&buf);
        }
        hex(&h.finalize())
    }

    pub fn checkpoint(&self, meta: String) -> Checkpoint<T> {
        let plain = |name: &str, net: &Mlp<T>, adam: Option<&AdamState<T>>| NetRecord {
            name: name.to_string(),
            kind: NetKind::Plain,
            arch: net.arch.clone(),
            action_scale: [0.0; 2],
            params: net.params.clone(),
            adam: adam.cloned(),
        };
        Checkpoint {
            meta,
            nets: vec![
                NetRecord {
                    name: "policy".into(),
                    kind: NetKind::Gaussian,
                    arch: self.policy.arch.clone(),
                    action_scale: self.policy.action_scale,
                    params: self.policy.params.clone(),
                    adam: Some(self.adam_policy.clone()),
                },
                plain("value", &self.value, Some(&self.adam_value)),
                plain("critic0", &self.critics[0], Some(&self.adam_critics[0])),
                plain("critic1", &self.critics[1], Some(&self.adam_critics[1])),
                plain("target0", &self.targets[0], None),
                plain("target1", &self.targets[1], None),
            ],
        }
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: u64,
    pub step: u64,
    pub value_loss: f64,
    pub critic_loss: f64,
    pub policy_loss: f64,
    pub value_grad_norm: f64,
    pub critic_grad_norm: f64,
    pub policy_grad_norm: f64,
    pub mean_critic_collisions: f64,
    pub wall_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub method: Method,
    pub epochs: Vec<EpochRecord>,
    pub stats: RunStats,
    pub params_digest: String,
    pub checkpoints: Vec<PathBuf>,
    pub wall_secs: f64,
}

impl TrainReport {
    /// Digest of everything except wall-clock timings and output paths.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.method.as_str());
        for e in &self.epochs {
            for v in [e.value_loss, e.critic_loss, e.policy_loss, e.value_grad_norm, e.critic_grad_norm, e.policy_grad_norm] {
                h.update(v.to_le_bytes());
            }
            h.update(e.step.to_le_bytes());
        }
        h.update(serde_json::to_vec(&self.stats).expect("stats serialize"));
        h.update(&self.params_digest);
        hex(&h.finalize())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "epoch,step,value_loss,critic_loss,policy_loss,value_grad_norm,critic_grad_norm,policy_grad_norm,mean_critic_collisions,wall_secs\n",
        );
        for e in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{:.3}\n",
                e.epoch, e.step, e.value_loss, e.critic_loss, e.policy_loss, e.value_grad_norm, e.critic_grad_norm,
                e.policy_grad_norm, e.mean_critic_collisions, e.wall_secs
            ));
        }
        out
    }
}

/// Checks that the dataset suits the method before any update runs.
pub fn check_dataset(ds: &OfflineDataset, method: Method) -> Result<(), OffrlError> {
    if ds.exp.is_empty() {
        return Err(OffrlError::Config("success partition is empty".into()));
    }
    if method == Method::IqlCa && ds.col.is_empty() {
        return Err(OffrlError::Config("iql_ca needs a non-empty collision partition".into()));
    }
    Ok(())
}

/// JSON stored in every checkpoint so evaluation can rebuild the encoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub encoder: StateEncoder,
    pub trainer: TrainerConfig,
    pub dataset_digest: String,
    pub step: u64,
}

impl CheckpointMeta {
    pub fn parse(text: &str) -> Result<Self, OffrlError> {
        serde_json::from_str(text).map_err(|e| OffrlError::Config(format!("checkpoint metadata: {e}")))
    }
}

/// Full training run; writes numbered checkpoints into `out_dir` if given.
pub fn train<T: Scalar>(ds: &OfflineDataset, cfg: &TrainerConfig, out_dir: Option<&Path>) -> Result<(Learner<T>, TrainReport), OffrlError> {
    check_dataset(ds, cfg.method)?;
    let dataset_digest = hex(&ds.meta.digest());
    let mut learner = Learner::<T>::new(cfg.clone(), ds.meta.encoder)?;
    let started = Instant::now();
    let mut epochs = Vec::new();
    let mut checkpoints = Vec::new();
    let mut acc = StepLosses::default();
    let mut collisions = 0usize;
    let mut in_epoch = 0u64;
    while learner.step < cfg.total_steps {
        let l = learner.train_step(ds)?;
        acc.value += l.value;
        acc.critic += l.critic;
        acc.policy += l.policy;
        acc.value_grad_norm += l.value_grad_norm;
        acc.critic_grad_norm += l.critic_grad_norm;
        acc.policy_grad_norm += l.policy_grad_norm;
        collisions += l.critic_collisions;
        in_epoch += 1;
        if learner.step % cfg.steps_per_epoch == 0 || learner.step == cfg.total_steps {
            let n = in_epoch as f64;
            epochs.push(EpochRecord {
                epoch: epochs.len() as u64 + 1,
                step: learner.step,
                value_loss: acc.value / n,
                critic_loss: acc.critic / n,
                policy_loss: acc.policy / n,
                value_grad_norm: acc.value_grad_norm / n,
                critic_grad_norm: acc.critic_grad_norm / n,
                policy_grad_norm: acc.policy_grad_norm / n,
                mean_critic_collisions: collisions as f64 / n,
                wall_secs: started.elapsed().as_secs_f64(),
            });
            acc = StepLosses::default();
            collisions = 0;
            in_epoch = 0;
        }
        if let Some(dir) = out_dir {
            if learner.step % cfg.eval_every == 0 || learner.step == cfg.total_steps {
                let path = dir.join(format!("checkpoint_{:07}.famlp", learner.step));
                let meta = CheckpointMeta { encoder: ds.meta.encoder, trainer: cfg.clone(), dataset_digest: dataset_digest.clone(), step: learner.step };
                learner.checkpoint(serde_json::to_string(&meta).expect("meta serializes")).save(&path)?;
                checkpoints.push(path);
            }
        }
    }
    let report = TrainReport {
        method: cfg.method,
        epochs,
        stats: learner.stats.clone(),
        params_digest: learner.params_digest(),
        checkpoints,
        wall_secs: started.elapsed().as_secs_f64(),
    };
    Ok((learner, report))
}
