//! `FAMLP1` checkpoint container.
//!
//! `"FAMLP1" | version u32 | float_bytes u8 | meta_len u32 | meta |
//! n_nets u32 | nets…`, each net being `name_len u16 | name | kind u8 |
//! n_widths u32 | widths u32… | activation codes u8… | action scale f64×2 |
//! n_params u64 | params | has_adam u8 | [t u64 | lr β₁ β₂ ε f64 | m | v]`.
//! All integers and floats are little-endian.

use super::{AdamState, Activation, Arch, NnError, Scalar};
use std::path::Path;

pub const CHECKPOINT_MAGIC: &[u8; 6] = b"FAMLP1";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetKind {
    Plain,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetRecord<T> {
    pub name: String,
    pub kind: NetKind,
    pub arch: Arch,
    pub action_scale: [f64; 2],
    pub params: Vec<T>,
    pub adam: Option<AdamState<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<T> {
    /// Free-form JSON echo of the run configuration.
    pub meta: String,
    pub nets: Vec<NetRecord<T>>,
}

impl<T: Scalar> Checkpoint<T> {
    pub fn net(&self, name: &str) -> Option<&NetRecord<T>> {
        self.nets.iter().find(|n| n.name == name)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.push(T::BYTES as u8);
        out.extend_from_slice(&(self.meta.len() as u32).to_le_bytes());
        out.extend_from_slice(self.meta.as_bytes());
        out.extend_from_slice(&(self.nets.len() as u32).to_le_bytes());
        for net in &self.nets {
            out.extend_from_slice(&(net.name.len() as u16).to_le_bytes());
            out.extend_from_slice(net.name.as_bytes());
            out.push(match net.kind {
                NetKind::Plain => 0,
                NetKind::Gaussian => 1,
            });
            out.extend_from_slice(&(net.arch.widths.len() as u32).to_le_bytes());
            for &w in &net.arch.widths {
                out.extend_from_slice(&(w as u32).to_le_bytes());
            }
            out.extend(net.arch.hidden.iter().map(|a| a.code()));
            for s in net.action_scale {
                out.extend_from_slice(&s.to_le_bytes());
            }
            out.extend_from_slice(&(net.params.len() as u64).to_le_bytes());
            net.params.iter().for_each(|p| p.write_le(&mut out));
            match &net.adam {
                None => out.push(0),
                Some(a) => {
                    out.push(1);
                    out.extend_from_slice(&a.t.to_le_bytes());
                    for x in [a.lr, a.beta1, a.beta2, a.eps] {
                        out.extend_from_slice(&x.to_le_bytes());
                    }
                    a.m.iter().chain(&a.v).for_each(|p| p.write_le(&mut out));
                }
            }
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), NnError> {
        std::fs::write(path, self.to_bytes()).map_err(|e| NnError::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, NnError> {
        let bytes = std::fs::read(path).map_err(|e| NnError::Io(format!("{}: {e}", path.display())))?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NnError> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(6)? != CHECKPOINT_MAGIC {
            return Err(NnError::Format { offset: 0, message: "bad magic bytes".into() });
        }
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(NnError::Format { offset: 6, message: format!("unsupported version {version}") });
        }
        let width = r.take(1)?[0] as usize;
        if width != T::BYTES {
            return Err(NnError::Format { offset: 10, message: format!("stored {width}-byte floats, expected {}", T::BYTES) });
        }
        let meta_len = r.u32()? as usize;
        let meta = String::from_utf8(r.take(meta_len)?.to_vec()).map_err(|_| r.fail("meta is not UTF-8"))?;
        let n_nets = r.u32()?;
        let mut nets = Vec::new();
        for _ in 0..n_nets {
            let name_len = u16::from_le_bytes(r.take(2)?.try_into().unwrap()) as usize;
            let name = String::from_utf8(r.take(name_len)?.to_vec()).map_err(|_| r.fail("name is not UTF-8"))?;
            let kind = match r.take(1)?[0] {
                0 => NetKind::Plain,
                1 => NetKind::Gaussian,
                _ => return Err(r.fail("unknown network kind")),
            };
            let n_widths = r.u32()? as usize;
            if !(2..=64).contains(&n_widths) {
                return Err(r.fail("implausible layer count"));
            }
            let widths = (0..n_widths).map(|_| r.u32().map(|w| w as usize)).collect::<Result<Vec<_>, _>>()?;
            let hidden = r
                .take(n_widths - 2)?
                .iter()
                .map(|&c| Activation::from_code(c))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| r.fail("unknown activation code"))?;
            let arch = Arch::new(widths, hidden).map_err(|e| r.fail(e.to_string()))?;
            let action_scale = [r.f64()?, r.f64()?];
            let n_params = r.u64()? as usize;
            let expected = arch.param_count() + if kind == NetKind::Gaussian { 2 } else { 0 };
            if n_params != expected {
                return Err(r.fail(format!("parameter count {n_params} does not match architecture ({expected})")));
            }
            let params = r.scalars::<T>(n_params)?;
            let adam = match r.take(1)?[0] {
                0 => None,
                1 => {
                    let t = r.u64()?;
                    let (lr, beta1, beta2, eps) = (r.f64()?, r.f64()?, r.f64()?, r.f64()?);
                    let m = r.scalars::<T>(n_params)?;
                    let v = r.scalars::<T>(n_params)?;
                    Some(AdamState { m, v, t, beta1, beta2, eps, lr })
                }
                _ => return Err(r.fail("bad optimizer flag")),
            };
            nets.push(NetRecord { name, kind, arch, action_scale, params, adam });
        }
        if r.pos != bytes.len() {
            return Err(r.fail("trailing bytes"));
        }
        Ok(Self { meta, nets })
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn fail(&self, message: impl Into<String>) -> NnError {
        NnError::Format { offset: self.pos as u64, message: message.into() }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], NnError> {
        if self.buf.len() - self.pos < n {
            return Err(self.fail("truncated"));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, NnError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, NnError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, NnError> {
        let at = self.pos;
        let x = f64::from_le_bytes(self.take(8)?.try_into().unwrap());
        if !x.is_finite() {
            return Err(NnError::Format { offset: at as u64, message: "non-finite number".into() });
        }
        Ok(x)
    }

    fn scalars<T: Scalar>(&mut self, n: usize) -> Result<Vec<T>, NnError> {
        let bytes = n.checked_mul(T::BYTES).ok_or_else(|| self.fail("length overflow"))?;
        let at = self.pos;
        let raw = self.take(bytes)?;
        let xs: Vec<T> = raw.chunks_exact(T::BYTES).map(T::read_le).collect();
        if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
            return Err(NnError::Format { offset: (at + i * T::BYTES) as u64, message: "non-finite number".into() });
        }
        Ok(xs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn sample() -> Checkpoint<f32> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let arch = Arch::uniform(4, &[3], 1, Activation::Relu).unwrap();
        let params: Vec<f32> = arch.init(&mut rng, 1.0);
        let mut adam = AdamState::new(params.len(), 3e-4);
        let mut p = params.clone();
        adam.step(&mut p, &vec![0.5; params.len()]).unwrap();
        Checkpoint {
            meta: "{\"method\":\"bc\"}".into(),
            nets: vec![NetRecord { name: "v".into(), kind: NetKind::Plain, arch, action_scale: [0.0; 2], params: p, adam: Some(adam) }],
        }
    }

    #[test]
    fn round_trip_bitwise() {
        let c = sample();
        let back = Checkpoint::<f32>::from_bytes(&c.to_bytes()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_bytes(), c.to_bytes());
    }

    #[test]
    fn rejects_wrong_precision_and_magic() {
        let bytes = sample().to_bytes();
        assert!(matches!(Checkpoint::<f64>::from_bytes(&bytes), Err(NnError::Format { offset: 10, .. })));
        let mut bad = bytes.clone();
        bad[1] = b'?';
        assert!(matches!(Checkpoint::<f32>::from_bytes(&bad), Err(NnError::Format { offset: 0, .. })));
        assert!(Checkpoint::<f32>::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn rejects_non_finite_parameters() {
        let mut c = sample();
        c.nets[0].params[2] = f32::INFINITY;
        let err = Checkpoint::<f32>::from_bytes(&c.to_bytes()).unwrap_err();
        assert!(matches!(err, NnError::Format { ref message, .. } if message == "non-finite number"), "{err}");
    }
}
