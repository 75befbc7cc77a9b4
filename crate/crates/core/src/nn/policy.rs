//! Tanh-squashed diagonal Gaussian policy over `(v, ω)`.
//!
//! `a = scale ⊙ tanh(u)`, `u ~ N(μ(s), diag(σ²))` with a state-independent
//! learned `log σ` clamped to `[LOG_STD_MIN, LOG_STD_MAX]`.

use super::mlp::{Arch, Tape};
use super::{NnError, Scalar};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub const LOG_STD_MIN: f64 = -5.0;
pub const LOG_STD_MAX: f64 = 2.0;
/// Actions on a bound are pulled this far inside before `atanh`.
pub const BOUND_MARGIN: f64 = 1e-6;
const ACTION_DIM: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPolicy<T> {
    /// Mean network; must have two outputs.
    pub arch: Arch,
    /// Mean-network parameters followed by the two `log σ` values.
    pub params: Vec<T>,
    pub action_scale: [f64; 2],
}

impl<T: Scalar> GaussianPolicy<T> {
    pub fn new<R: Rng>(arch: Arch, action_scale: [f64; 2], rng: &mut R) -> Result<Self, NnError> {
        if arch.output_dim() != ACTION_DIM {
            return Err(NnError::Config(format!("policy mean must have 2 outputs, has {}", arch.output_dim())));
        }
        let mut params = arch.init(rng, 1e-2);
        params.extend([T::zero(); ACTION_DIM]);
        Ok(Self { arch, params, action_scale })
    }

    pub fn from_params(arch: Arch, params: Vec<T>, action_scale: [f64; 2]) -> Result<Self, NnError> {
        if arch.output_dim() != ACTION_DIM || params.len() != arch.param_count() + ACTION_DIM {
            return Err(NnError::Shape { what: "policy parameters", expected: arch.param_count() + ACTION_DIM, found: params.len() });
        }
        Ok(Self { arch, params, action_scale })
    }

    fn mean_params(&self) -> &[T] {
        &self.params[..self.arch.param_count()]
    }

    /// Clamped `log σ` for both channels.
    pub fn log_std(&self) -> [T; 2] {
        let raw = &self.params[self.arch.param_count()..];
        let (lo, hi) = (T::of(LOG_STD_MIN), T::of(LOG_STD_MAX));
        [raw[0].max(lo).min(hi), raw[1].max(lo).min(hi)]
    }

    pub fn means(&self, states: &[T], batch: usize) -> Result<Vec<T>, NnError> {
        self.arch.forward(self.mean_params(), states, batch)
    }

    /// Deterministic action `scale ⊙ tanh(μ(s))` for each row.
    pub fn mode(&self, states: &[T], batch: usize) -> Result<Vec<[f64; 2]>, NnError> {
        let mu = self.means(states, batch)?;
        Ok(mu
            .chunks_exact(ACTION_DIM)
            .map(|m| [self.action_scale[0] * m[0].f64().tanh(), self.action_scale[1] * m[1].f64().tanh()])
            .collect())
    }

    pub fn sample<R: Rng>(&self, state: &[T], rng: &mut R) -> Result<[f64; 2], NnError> {
        let mu = self.means(state, 1)?;
        let ls = self.log_std();
        let mut a = [0.0; 2];
        for j in 0..ACTION_DIM {
            let z: f64 = StandardNormal.sample(rng);
            let u = mu[j].f64() + ls[j].f64().exp() * z;
            a[j] = self.action_scale[j] * u.tanh();
        }
        Ok(a)
    }

    /// Pre-squash value `atanh(a/scale)` and `log|da/du|` for one channel.
    fn invert(&self, a: T, j: usize) -> (T, T) {
        let scale = self.action_scale[j];
        let bound = scale - BOUND_MARGIN;
        let y = (a.f64().clamp(-bound, bound) / scale).clamp(-1.0 + f64::EPSILON, 1.0 - f64::EPSILON);
        let u = y.atanh();
        let log_jac = scale.ln() + (1.0 - y * y).ln();
        (T::of(u), T::of(log_jac))
    }

    pub fn log_prob(&self, states: &[T], actions: &[T], batch: usize) -> Result<Vec<T>, NnError> {
        let mu = self.means(states, batch)?;
        self.log_prob_from_means(&mu, actions, batch)
    }

    fn log_prob_from_means(&self, mu: &[T], actions: &[T], batch: usize) -> Result<Vec<T>, NnError> {
        if actions.len() != batch * ACTION_DIM {
            return Err(NnError::Shape { what: "actions", expected: batch * ACTION_DIM, found: actions.len() });
        }
        let ls = self.log_std();
        let half_log_2pi = T::of(0.5 * (2.0 * std::f64::consts::PI).ln());
        let half = T::of(0.5);
        let mut out = Vec::with_capacity(batch);
        for i in 0..batch {
            let mut lp = T::zero();
            for j in 0..ACTION_DIM {
                let (u, log_jac) = self.invert(actions[i * ACTION_DIM + j], j);
                let z = (u - mu[i * ACTION_DIM + j]) / ls[j].exp();
                lp += -half * z * z - ls[j] - half_log_2pi - log_jac;
            }
            out.push(lp);
        }
        Ok(out)
    }

    /// Weighted negative log-likelihood `−mean(wᵢ·log π(aᵢ|sᵢ))` and its
    /// gradient, accumulated into `grads`. Weights are constants.
    pub fn weighted_nll(&self, states: &[T], actions: &[T], weights: &[T], batch: usize, grads: &mut [T]) -> Result<T, NnError> {
        if weights.len() != batch {
            return Err(NnError::Shape { what: "weights", expected: batch, found: weights.len() });
        }
        if grads.len() != self.params.len() {
            return Err(NnError::Shape { what: "gradient buffer", expected: self.params.len(), found: grads.len() });
        }
        let tape: Tape<T> = self.arch.forward_tape(self.mean_params(), states, batch)?;
        let mu = tape.output();
        let logp = self.log_prob_from_means(mu, actions, batch)?;
        let n = T::of(batch as f64);
        let loss = -logp.iter().zip(weights).map(|(&l, &w)| w * l).sum::<T>() / n;
        if !loss.is_finite() {
            return Err(NnError::NonFinite { layer: self.arch.layers() });
        }
        let ls = self.log_std();
        let raw = &self.params[self.arch.param_count()..];
        let var = [(ls[0] + ls[0]).exp(), (ls[1] + ls[1]).exp()];
        let mut g_mu = vec![T::zero(); batch * ACTION_DIM];
        let mut g_ls = [T::zero(); 2];
        for i in 0..batch {
            let c = weights[i] / n;
            for j in 0..ACTION_DIM {
                let (u, _) = self.invert(actions[i * ACTION_DIM + j], j);
                let d = u - mu[i * ACTION_DIM + j];
                // ∂logp/∂μ = d/σ², ∂logp/∂logσ = d²/σ² − 1
                g_mu[i * ACTION_DIM + j] = -c * d / var[j];
                g_ls[j] -= c * (d * d / var[j] - T::one());
            }
        }
        let split = self.arch.param_count();
        let (g_mean, g_log_std) = grads.split_at_mut(split);
        self.arch.backward(self.mean_params(), &tape, &g_mu, g_mean)?;
        for j in 0..ACTION_DIM {
            let inside = raw[j] >= T::of(LOG_STD_MIN) && raw[j] <= T::of(LOG_STD_MAX);
            if inside {
                g_log_std[j] += g_ls[j];
            }
        }
        Ok(loss)
    }
}
