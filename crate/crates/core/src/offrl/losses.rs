//! The three IQL objectives and behaviour cloning, each returning the
//! scalar loss and its exact gradient with respect to one network.
//!
//! Cross terms are constants: expectile targets come from the target
//! critics, TD targets from `V(s′)`, and advantage weights are never
//! differentiated.

use super::OffrlError;
use crate::data::Outcome;
use crate::nn::{GaussianPolicy, Mlp, Scalar};

/// `mean |τ − 1{u<0}|·u²`.
pub fn expectile_loss<T: Scalar>(u: &[T], tau: f64) -> T {
    expectile_loss_grad(u, tau).0
}

/// Loss and `∂L/∂u`.
pub fn expectile_loss_grad<T: Scalar>(u: &[T], tau: f64) -> (T, Vec<T>) {
    let n = T::of(u.len().max(1) as f64);
    let (hi, lo) = (T::of(tau), T::of(1.0 - tau));
    let two = T::of(2.0);
    let mut loss = T::zero();
    let grad = u
        .iter()
        .map(|&x| {
            let w = if x < T::zero() { lo } else { hi };
            loss += w * x * x;
            two * w * x / n
        })
        .collect();
    (loss / n, grad)
}

/// Inputs that the TD target is built from; all constants.
#[derive(Debug, Clone, Copy)]
pub struct TdTargets<'a, T> {
    pub rewards: &'a [T],
    /// `1 − done`.
    pub not_done: &'a [T],
    pub v_next: &'a [T],
    pub gamma: f64,
}

impl<T: Scalar> TdTargets<'_, T> {
    pub fn targets(&self) -> Vec<T> {
        let g = T::of(self.gamma);
        self.rewards
            .iter()
            .zip(self.not_done)
            .zip(self.v_next)
            .map(|((&r, &m), &v)| r + m * g * v)
            .collect()
    }
}

/// `mean (Q − (r + (1−done)·γ·V(s′)))²` and `∂L/∂Q`.
pub fn td_loss_grad<T: Scalar>(q: &[T], td: &TdTargets<'_, T>) -> (T, Vec<T>) {
    let n = T::of(q.len().max(1) as f64);
    let two = T::of(2.0);
    let y = td.targets();
    let mut loss = T::zero();
    let grad = q
        .iter()
        .zip(&y)
        .map(|(&q, &y)| {
            let d = q - y;
            loss += d * d;
            two * d / n
        })
        .collect();
    (loss / n, grad)
}

pub fn td_loss<T: Scalar>(q: &[T], td: &TdTargets<'_, T>) -> T {
    td_loss_grad(q, td).0
}

/// Value objective: expectile regression of `V(s)` toward `target_q`.
pub fn value_objective<T: Scalar>(value: &Mlp<T>, states: &[T], target_q: &[T], tau: f64) -> Result<(T, Vec<T>), OffrlError> {
    let n = target_q.len();
    let tape = value.forward_tape(states, n)?;
    let u: Vec<T> = target_q.iter().zip(tape.output()).map(|(&q, &v)| q - v).collect();
    let (loss, du) = expectile_loss_grad(&u, tau);
    // u = q − V, so ∂L/∂V = −∂L/∂u
    let dv: Vec<T> = du.into_iter().map(|g| -g).collect();
    let mut grads = vec![T::zero(); value.params.len()];
    // a non-finite loss is reported by the caller with its name
    if !loss.is_finite() {
        return Ok((loss, grads));
    }
    value.backward(&tape, &dv, &mut grads)?;
    Ok((loss, grads))
}

/// Critic objective on `[s ∥ a]` rows.
pub fn critic_objective<T: Scalar>(critic: &Mlp<T>, state_actions: &[T], td: &TdTargets<'_, T>) -> Result<(T, Vec<T>), OffrlError> {
    let n = td.rewards.len();
    let tape = critic.forward_tape(state_actions, n)?;
    let (loss, dq) = td_loss_grad(tape.output(), td);
    let mut grads = vec![T::zero(); critic.params.len()];
    if !loss.is_finite() {
        return Ok((loss, grads));
    }
    critic.backward(&tape, &dq, &mut grads)?;
    Ok((loss, grads))
}

/// Rows the policy is fitted on, with their trajectory labels.
#[derive(Debug, Clone)]
pub struct PolicyBatch<'a, T> {
    pub states: &'a [T],
    /// Physical `(v, ω)` pairs.
    pub actions: &'a [T],
    pub labels: &'a [Outcome],
}

impl<T> PolicyBatch<'_, T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn collision_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == Outcome::Collision).count()
    }

    fn guard(&self) -> Result<(), OffrlError> {
        match self.collision_count() {
            0 => Ok(()),
            n => Err(OffrlError::ContractViolation(format!("{n} collision-labeled transitions reached the policy loss"))),
        }
    }
}

/// `min(exp(β·A), w_max)` per sample.
pub fn advantage_weights<T: Scalar>(adv: &[T], beta: f64, max_weight: f64) -> Vec<T> {
    let (b, cap) = (T::of(beta), T::of(max_weight));
    adv.iter().map(|&a| (b * a).exp().min(cap)).collect()
}

/// Weighted log-likelihood without the label guard; the pooled-data
/// baseline is the only caller that may feed collision rows.
pub fn weighted_policy_objective<T: Scalar>(
    policy: &GaussianPolicy<T>,
    batch: &PolicyBatch<'_, T>,
    weights: &[T],
) -> Result<(T, Vec<T>), OffrlError> {
    let mut grads = vec![T::zero(); policy.params.len()];
    let loss = policy.weighted_nll(batch.states, batch.actions, weights, batch.len(), &mut grads)?;
    Ok((loss, grads))
}

/// Advantage-weighted regression on success-only rows.
pub fn awr_objective<T: Scalar>(
    policy: &GaussianPolicy<T>,
    batch: &PolicyBatch<'_, T>,
    advantages: &[T],
    beta: f64,
    max_weight: f64,
) -> Result<(T, Vec<T>), OffrlError> {
    batch.guard()?;
    let w = advantage_weights(advantages, beta, max_weight);
    weighted_policy_objective(policy, batch, &w)
}

/// Behaviour cloning: AWR with unit weights.
pub fn bc_objective<T: Scalar>(policy: &GaussianPolicy<T>, batch: &PolicyBatch<'_, T>) -> Result<(T, Vec<T>), OffrlError> {
    batch.guard()?;
    let w = vec![T::one(); batch.len()];
    weighted_policy_objective(policy, batch, &w)
}
