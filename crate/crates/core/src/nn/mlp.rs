use super::scalar::{gemm, Scalar};
use super::NnError;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    pub fn code(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::Tanh => 1,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(Activation::Relu),
            1 => Some(Activation::Tanh),
            _ => None,
        }
    }
}

/// Layer widths and hidden activations; the output layer is linear.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arch {
    pub widths: Vec<usize>,
    pub hidden: Vec<Activation>,
}

impl Arch {
    pub fn new(widths: Vec<usize>, hidden: Vec<Activation>) -> Result<Self, NnError> {
        if widths.len() < 2 || widths.iter().any(|&w| w == 0) || hidden.len() != widths.len() - 2 {
            return Err(NnError::Config(format!("invalid architecture {widths:?} / {hidden:?}")));
        }
        Ok(Self { widths, hidden })
    }

    /// `[input, hidden…, output]` with one activation for every hidden layer.
    pub fn uniform(input: usize, hidden: &[usize], output: usize, act: Activation) -> Result<Self, NnError> {
        let mut widths = vec![input];
        widths.extend_from_slice(hidden);
        widths.push(output);
        Self::new(widths, vec![act; hidden.len()])
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().unwrap()
    }

    pub fn layers(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn param_count(&self) -> usize {
        self.widths.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    /// Offset of layer `l`'s weight block; its bias follows the weights.
    fn offset(&self, l: usize) -> usize {
        self.widths[..=l].windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    fn layer<'p, T>(&self, params: &'p [T], l: usize) -> (&'p [T], &'p [T]) {
        let (i, o) = (self.widths[l], self.widths[l + 1]);
        let at = self.offset(l);
        (&params[at..at + i * o], &params[at + i * o..at + i * o + o])
    }

    /// He-normal weights (Glorot for tanh), zero biases. The final layer is
    /// multiplied by `out_scale`.
    pub fn init<T: Scalar, R: Rng>(&self, rng: &mut R, out_scale: f64) -> Vec<T> {
        let mut params = Vec::with_capacity(self.param_count());
        for l in 0..self.layers() {
            let (i, o) = (self.widths[l], self.widths[l + 1]);
            let gain = match self.hidden.get(l) {
                Some(Activation::Tanh) => 1.0,
                _ => 2.0,
            };
            let std = (gain / i as f64).sqrt() * if l + 1 == self.layers() { out_scale } else { 1.0 };
            let normal = Normal::new(0.0, std).expect("finite std");
            params.extend((0..i * o).map(|_| T::of(normal.sample(rng))));
            params.extend((0..o).map(|_| T::zero()));
        }
        params
    }

    pub fn forward<T: Scalar>(&self, params: &[T], x: &[T], batch: usize) -> Result<Vec<T>, NnError> {
        let tape = self.forward_tape(params, x, batch)?;
        Ok(tape.into_output())
    }

    /// Forward pass keeping every layer's activations for [`Arch::backward`].
    pub fn forward_tape<T: Scalar>(&self, params: &[T], x: &[T], batch: usize) -> Result<Tape<T>, NnError> {
        if params.len() != self.param_count() {
            return Err(NnError::Shape { what: "parameters", expected: self.param_count(), found: params.len() });
        }
        if x.len() != batch * self.input_dim() {
            return Err(NnError::Shape { what: "input", expected: batch * self.input_dim(), found: x.len() });
        }
        let mut acts = Vec::with_capacity(self.layers() + 1);
        acts.push(x.to_vec());
        for l in 0..self.layers() {
            let (i, o) = (self.widths[l], self.widths[l + 1]);
            let (w, b) = self.layer(params, l);
            let mut y = Vec::with_capacity(batch * o);
            for _ in 0..batch {
                y.extend_from_slice(b);
            }
            gemm(batch, i, o, &acts[l], false, w, false, &mut y, true);
            match self.hidden.get(l) {
                Some(Activation::Relu) => y.iter_mut().for_each(|v| *v = v.max(T::zero())),
                Some(Activation::Tanh) => y.iter_mut().for_each(|v| *v = v.tanh()),
                None => {}
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(NnError::NonFinite { layer: l });
            }
            acts.push(y);
        }
        Ok(Tape { batch, acts })
    }

    /// Accumulates `∂L/∂params` into `grads` given `∂L/∂output`.
    pub fn backward<T: Scalar>(&self, params: &[T], tape: &Tape<T>, grad_out: &[T], grads: &mut [T]) -> Result<(), NnError> {
        let batch = tape.batch;
        if grad_out.len() != batch * self.output_dim() {
            return Err(NnError::Shape { what: "output gradient", expected: batch * self.output_dim(), found: grad_out.len() });
        }
        if grads.len() != params.len() {
            return Err(NnError::Shape { what: "gradient buffer", expected: params.len(), found: grads.len() });
        }
        let mut delta = grad_out.to_vec();
        for l in (0..self.layers()).rev() {
            let (i, o) = (self.widths[l], self.widths[l + 1]);
            let out = &tape.acts[l + 1];
            match self.hidden.get(l) {
                Some(Activation::Relu) => delta.iter_mut().zip(out).for_each(|(d, &y)| {
                    if y <= T::zero() {
                        *d = T::zero();
                    }
                }),
                Some(Activation::Tanh) => delta.iter_mut().zip(out).for_each(|(d, &y)| *d *= T::one() - y * y),
                None => {}
            }
            if delta.iter().any(|v| !v.is_finite()) {
                return Err(NnError::NonFinite { layer: l });
            }
            let at = self.offset(l);
            let (gw, rest) = grads[at..].split_at_mut(i * o);
            gemm(i, batch, o, &tape.acts[l], true, &delta, false, gw, true);
            let gb = &mut rest[..o];
            for row in delta.chunks_exact(o) {
                gb.iter_mut().zip(row).for_each(|(g, &d)| *g += d);
            }
            if l > 0 {
                let (w, _) = self.layer(params, l);
                let mut prev = vec![T::zero(); batch * i];
                gemm(batch, o, i, &delta, false, w, true, &mut prev, false);
                delta = prev;
            }
        }
        Ok(())
    }
}

/// Activations recorded by a forward pass; `acts[0]` is the input.
#[derive(Debug, Clone)]
pub struct Tape<T> {
    pub batch: usize,
    acts: Vec<Vec<T>>,
}

impl<T> Tape<T> {
    pub fn output(&self) -> &[T] {
        self.acts.last().unwrap()
    }

    pub fn into_output(mut self) -> Vec<T> {
        self.acts.pop().unwrap()
    }
}

/// A network together with its flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T> {
    pub arch: Arch,
    pub params: Vec<T>,
}

impl<T: Scalar> Mlp<T> {
    pub fn new<R: Rng>(arch: Arch, rng: &mut R) -> Self {
        let params = arch.init(rng, 1.0);
        Self { arch, params }
    }

    pub fn from_params(arch: Arch, params: Vec<T>) -> Result<Self, NnError> {
        if params.len() != arch.param_count() {
            return Err(NnError::Shape { what: "parameters", expected: arch.param_count(), found: params.len() });
        }
        Ok(Self { arch, params })
    }

    pub fn forward(&self, x: &[T], batch: usize) -> Result<Vec<T>, NnError> {
        self.arch.forward(&self.params, x, batch)
    }

    pub fn forward_tape(&self, x: &[T], batch: usize) -> Result<Tape<T>, NnError> {
        self.arch.forward_tape(&self.params, x, batch)
    }

    pub fn backward(&self, tape: &Tape<T>, grad_out: &[T], grads: &mut [T]) -> Result<(), NnError> {
        self.arch.backward(&self.params, tape, grad_out, grads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Straight-line recomputation with explicit loops.
    fn oracle(arch: &Arch, p: &[f64], x: &[f64]) -> Vec<f64> {
        let mut h = x.to_vec();
        let mut at = 0;
        for l in 0..arch.layers() {
            let (i, o) = (arch.widths[l], arch.widths[l + 1]);
            let w = &p[at..at + i * o];
            let b = &p[at + i * o..at + i * o + o];
            at += i * o + o;
            let mut y = b.to_vec();
            for (r, &hr) in h.iter().enumerate() {
                for c in 0..o {
                    y[c] += hr * w[r * o + c];
                }
            }
            if let Some(a) = arch.hidden.get(l) {
                for v in &mut y {
                    *v = match a {
                        Activation::Relu => v.max(0.0),
                        Activation::Tanh => v.tanh(),
                    };
                }
            }
            h = y;
        }
        h
    }

    #[test]
    fn param_count_formula() {
        let a = Arch::uniform(112, &[256, 256], 1, Activation::Relu).unwrap();
        assert_eq!(a.param_count(), 112 * 256 + 256 + 256 * 256 + 256 + 256 + 1);
    }

    #[test]
    fn identity_layer() {
        let arch = Arch::new(vec![3, 3], vec![]).unwrap();
        let mut p = vec![0.0; 12];
        for i in 0..3 {
            p[i * 3 + i] = 1.0;
        }
        let x = [0.5, -2.0, 7.0, 1.0, 2.0, 3.0];
        assert_eq!(arch.forward(&p, &x, 2).unwrap(), x.to_vec());
    }

    #[test]
    fn zero_weights_give_bias() {
        let arch = Arch::uniform(4, &[5], 2, Activation::Tanh).unwrap();
        let mut p = vec![0.0f64; arch.param_count()];
        let n = p.len();
        p[n - 2] = 0.25;
        p[n - 1] = -3.0;
        let out = arch.forward(&p, &[9.0, 1.0, -4.0, 2.0], 1).unwrap();
        assert_eq!(out, vec![0.25, -3.0]);
    }

    #[test]
    fn matches_loop_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let arch = Arch::uniform(112, &[256, 256], 1, Activation::Relu).unwrap();
        let p: Vec<f64> = arch.init(&mut rng, 1.0);
        let x: Vec<f64> = (0..112 * 3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let out = arch.forward(&p, &x, 3).unwrap();
        for r in 0..3 {
            let want = oracle(&arch, &p, &x[r * 112..(r + 1) * 112]);
            assert!((out[r] - want[0]).abs() < 1e-6, "{} vs {}", out[r], want[0]);
        }
    }

    #[test]
    fn width_mismatch() {
        let arch = Arch::uniform(4, &[3], 1, Activation::Relu).unwrap();
        let p = vec![0.0f32; arch.param_count()];
        assert!(matches!(arch.forward(&p, &[1.0; 5], 1), Err(NnError::Shape { .. })));
    }

    #[test]
    fn non_finite_names_layer() {
        let arch = Arch::uniform(2, &[2], 1, Activation::Relu).unwrap();
        let mut p = vec![1.0f64; arch.param_count()];
        p[0] = f64::MAX;
        match arch.forward(&p, &[f64::MAX, 1.0], 1) {
            Err(NnError::NonFinite { layer }) => assert_eq!(layer, 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn linear_least_squares_gradient_closed_form() {
        // L = mean (Xw + b − y)² ; ∂L/∂w = 2·Xᵀ(Xw + b − y)/n
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let arch = Arch::new(vec![3, 1], vec![]).unwrap();
        let p: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = 6;
        let x: Vec<f64> = (0..n * 3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let tape = arch.forward_tape(&p, &x, n).unwrap();
        let resid: Vec<f64> = tape.output().iter().zip(&y).map(|(o, t)| o - t).collect();
        let g_out: Vec<f64> = resid.iter().map(|r| 2.0 * r / n as f64).collect();
        let mut g = vec![0.0; 4];
        arch.backward(&p, &tape, &g_out, &mut g).unwrap();
        for j in 0..3 {
            let closed: f64 = (0..n).map(|i| 2.0 * x[i * 3 + j] * resid[i]).sum::<f64>() / n as f64;
            assert!((g[j] - closed).abs() < 1e-12);
        }
        let closed_b: f64 = resid.iter().map(|r| 2.0 * r).sum::<f64>() / n as f64;
        assert!((g[3] - closed_b).abs() < 1e-12);
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for act in [Activation::Relu, Activation::Tanh] {
            let arch = Arch::uniform(5, &[7, 6], 2, act).unwrap();
            let p: Vec<f64> = arch.init(&mut rng, 1.0);
            let x: Vec<f64> = (0..4 * 5).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let loss = |p: &[f64]| -> f64 {
                arch.forward(p, &x, 4).unwrap().iter().zip(&c).map(|(o, c)| (o * c).sin()).sum()
            };
            let tape = arch.forward_tape(&p, &x, 4).unwrap();
            let g_out: Vec<f64> = tape.output().iter().zip(&c).map(|(o, c)| (o * c).cos() * c).collect();
            let mut g = vec![0.0; p.len()];
            arch.backward(&p, &tape, &g_out, &mut g).unwrap();
            for j in (0..p.len()).step_by(7) {
                let mut hi = p.clone();
                let mut lo = p.clone();
                hi[j] += 1e-5;
                lo[j] -= 1e-5;
                let fd = (loss(&hi) - loss(&lo)) / 2e-5;
                assert!((fd - g[j]).abs() <= 1e-6 + 1e-4 * fd.abs(), "{act:?} param {j}: {fd} vs {}", g[j]);
            }
        }
    }
}
