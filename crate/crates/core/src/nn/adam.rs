use super::{NnError, Scalar};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState<T> {
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub lr: f64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(dim: usize, lr: f64) -> Self {
        Self { m: vec![T::zero(); dim], v: vec![T::zero(); dim], t: 0, beta1: 0.9, beta2: 0.999, eps: 1e-8, lr }
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut [T], grads: &[T]) -> Result<(), NnError> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(NnError::Shape { what: "adam vectors", expected: self.m.len(), found: grads.len() });
        }
        if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
            return Err(NnError::NonFiniteGradient { index: i });
        }
        self.t += 1;
        let (b1, b2) = (T::of(self.beta1), T::of(self.beta2));
        let (one_b1, one_b2) = (T::of(1.0 - self.beta1), T::of(1.0 - self.beta2));
        let c1 = 1.0 - self.beta1.powi(self.t.min(i32::MAX as u64) as i32);
        let c2 = 1.0 - self.beta2.powi(self.t.min(i32::MAX as u64) as i32);
        // lr·m̂/(√v̂+ε) = (lr/c1)·m / (√v/√c2 + ε)
        let step = T::of(self.lr / c1);
        let inv_sqrt_c2 = T::of(1.0 / c2.sqrt());
        let eps = T::of(self.eps);
        for (((p, &g), m), v) in params.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            *m = b1 * *m + one_b1 * g;
            *v = b2 * *v + one_b2 * g * g;
            *p -= step * *m / (v.sqrt() * inv_sqrt_c2 + eps);
        }
        Ok(())
    }
}

/// `target ← (1 − α)·target + α·online`.
pub fn soft_update<T: Scalar>(target: &mut [T], online: &[T], alpha: f64) -> Result<(), NnError> {
    if target.len() != online.len() {
        return Err(NnError::Shape { what: "soft update", expected: target.len(), found: online.len() });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(NnError::Config(format!("soft update coefficient {alpha} outside (0, 1]")));
    }
    if alpha == 1.0 {
        target.copy_from_slice(online);
        return Ok(());
    }
    let (keep, mix) = (T::of(1.0 - alpha), T::of(alpha));
    target.iter_mut().zip(online).for_each(|(t, &o)| *t = keep * *t + mix * o);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut s = AdamState::<f64>::new(1, 3e-4);
        let mut p = [0.0];
        s.step(&mut p, &[1.0]).unwrap();
        // m̂ = 1, v̂ = 1 → Δ = −λ/(1+ε)
        assert!((p[0] + 3e-4 / (1.0 + 1e-8)).abs() < 1e-15);
        assert_eq!(s.t, 1);
    }

    #[test]
    fn zero_gradient_is_noop() {
        let mut s = AdamState::<f32>::new(3, 1e-3);
        let mut p = [1.0, -2.0, 0.5];
        s.step(&mut p, &[0.0; 3]).unwrap();
        assert_eq!(p, [1.0, -2.0, 0.5]);
    }

    #[test]
    fn rejects_non_finite() {
        let mut s = AdamState::<f32>::new(2, 1e-3);
        let mut p = [0.0; 2];
        assert_eq!(s.step(&mut p, &[0.0, f32::NAN]), Err(NnError::NonFiniteGradient { index: 1 }));
    }

    #[test]
    fn loss_scaling_keeps_sign_pattern() {
        let grads = [0.3, -1.2, 4.0, -1e-3, 0.0];
        let run = |c: f64| {
            let mut s = AdamState::<f64>::new(5, 1e-2);
            let mut p = [0.0; 5];
            for k in 0..5 {
                let g: Vec<f64> = grads.iter().map(|g| c * g * (1.0 + 0.1 * k as f64)).collect();
                s.step(&mut p, &g).unwrap();
            }
            p
        };
        let base = run(1.0);
        for c in [0.1, 10.0] {
            let scaled = run(c);
            for (a, b) in base.iter().zip(&scaled) {
                assert_eq!(a.signum() == b.signum(), true, "{a} vs {b}");
                assert!((a - b).abs() < 1e-3 * (1.0 + a.abs()), "Adam is scale-invariant up to ε: {a} vs {b}");
            }
        }
    }

    #[test]
    fn soft_update_cases() {
        let mut t = [0.0f64; 2];
        soft_update(&mut t, &[1.0, 1.0], 0.005).unwrap();
        assert!((t[0] - 0.005).abs() < 1e-15);
        soft_update(&mut t, &[3.0, -1.0], 1.0).unwrap();
        assert_eq!(t, [3.0, -1.0]);
        let mut same = [2.0, 5.0];
        soft_update(&mut same, &[2.0, 5.0], 0.3).unwrap();
        assert_eq!(same, [2.0, 5.0]);
        assert!(soft_update(&mut same, &[0.0, 0.0], 0.0).is_err());
    }
}
