//! Binary dataset container.
//!
//! Layout (little-endian):
//! `"FANAV1" | schema u32 | beam_count u32 | n_exp u64 | n_col u64 |
//! digest [32] | meta_len u32 | meta JSON | records…`, exp records first.
//! A record is `s f32×dim | a f32×2 | r f32 | s′ f32×dim | done u8 |
//! outcome u8 | traj_id u64 | t u32` with `dim = beam_count + 4`.

use super::{DataError, DatasetMeta, OfflineDataset, Outcome, Transition};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;

pub const DATASET_MAGIC: &[u8; 6] = b"FANAV1";
pub const DATASET_SCHEMA: u32 = 1;

fn record_size(dim: usize) -> usize {
    4 * (2 * dim + 3) + 2 + 8 + 4
}

pub fn write_dataset<W: Write>(ds: &OfflineDataset, mut w: W) -> Result<(), DataError> {
    let io = |e: std::io::Error| DataError::Io(e.to_string());
    let meta = serde_json::to_vec(&ds.meta).map_err(|e| DataError::Io(e.to_string()))?;
    let dim = ds.meta.encoder.dim();
    let mut head = Vec::with_capacity(64 + meta.len());
    head.extend_from_slice(DATASET_MAGIC);
    head.extend_from_slice(&DATASET_SCHEMA.to_le_bytes());
    head.extend_from_slice(&(ds.meta.encoder.beam_count as u32).to_le_bytes());
    head.extend_from_slice(&(ds.exp.len() as u64).to_le_bytes());
    head.extend_from_slice(&(ds.col.len() as u64).to_le_bytes());
    head.extend_from_slice(&ds.meta.digest());
    head.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    head.extend_from_slice(&meta);
    w.write_all(&head).map_err(io)?;
    let mut rec = Vec::with_capacity(record_size(dim));
    for tr in ds.exp.iter().chain(&ds.col) {
        if tr.s.len() != dim || tr.s_next.len() != dim {
            return Err(DataError::Shape { expected: dim, found: tr.s.len() });
        }
        rec.clear();
        tr.s.iter().for_each(|v| rec.extend_from_slice(&v.to_le_bytes()));
        tr.a.iter().for_each(|v| rec.extend_from_slice(&v.to_le_bytes()));
        rec.extend_from_slice(&tr.r.to_le_bytes());
        tr.s_next.iter().for_each(|v| rec.extend_from_slice(&v.to_le_bytes()));
        rec.push(tr.done as u8);
        rec.push(tr.outcome.code());
        rec.extend_from_slice(&tr.traj_id.to_le_bytes());
        rec.extend_from_slice(&tr.t.to_le_bytes());
        w.write_all(&rec).map_err(io)?;
    }
    Ok(())
}

pub fn save_dataset(ds: &OfflineDataset, path: &Path) -> Result<(), DataError> {
    let file = std::fs::File::create(path).map_err(|e| DataError::Io(format!("{}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    write_dataset(ds, &mut w)?;
    w.flush().map_err(|e| DataError::Io(e.to_string()))
}

pub fn load_dataset(path: &Path) -> Result<OfflineDataset, DataError> {
    let bytes = std::fs::read(path).map_err(|e| DataError::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(&bytes)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn fail(&self, message: impl Into<String>) -> DataError {
        DataError::Format { offset: self.pos as u64, message: message.into() }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], DataError> {
        if self.buf.len() - self.pos < n {
            return Err(self.fail(format!("truncated while reading {what}")));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32, DataError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64, DataError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f32s(&mut self, n: usize, what: &str) -> Result<Vec<f32>, DataError> {
        let at = self.pos;
        let raw = self.take(4 * n, what)?;
        let xs: Vec<f32> = raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
        if let Some(i) = xs.iter().position(|x| !x.is_finite()) {
            return Err(DataError::Format { offset: (at + 4 * i) as u64, message: format!("non-finite {what}") });
        }
        Ok(xs)
    }
}

pub fn parse_dataset(bytes: &[u8]) -> Result<OfflineDataset, DataError> {
    let mut c = Cursor { buf: bytes, pos: 0 };
    if c.take(6, "magic")? != DATASET_MAGIC {
        return Err(DataError::Format { offset: 0, message: "bad magic bytes".into() });
    }
    let schema = c.u32("schema")?;
    if schema != DATASET_SCHEMA {
        return Err(DataError::Format { offset: 6, message: format!("unsupported schema {schema}") });
    }
    let beam_count = c.u32("beam count")? as usize;
    let n_exp = c.u64("exp count")?;
    let n_col = c.u64("col count")?;
    let digest: [u8; 32] = c.take(32, "digest")?.try_into().unwrap();
    let meta_len = c.u32("meta length")? as usize;
    let meta_at = c.pos;
    let meta_raw = c.take(meta_len, "meta")?;
    let meta: DatasetMeta = serde_json::from_slice(meta_raw)
        .map_err(|e| DataError::Format { offset: meta_at as u64, message: format!("meta: {e}") })?;
    let raw_digest: [u8; 32] = Sha256::digest(meta_raw).into();
    if raw_digest != digest {
        return Err(DataError::Format { offset: meta_at as u64, message: "meta digest mismatch".into() });
    }
    if meta.encoder.beam_count != beam_count {
        return Err(DataError::Format { offset: 10, message: "beam count disagrees with meta".into() });
    }
    let dim = meta.encoder.dim();
    let remaining = (bytes.len() - c.pos) as u128;
    let expected = (n_exp as u128 + n_col as u128) * record_size(dim) as u128;
    if remaining != expected {
        return Err(c.fail(format!("record area holds {remaining} bytes, header implies {expected}")));
    }
    let mut ds = OfflineDataset::new(meta);
    ds.exp.reserve(n_exp as usize);
    ds.col.reserve(n_col as usize);
    for i in 0..(n_exp + n_col) {
        let start = c.pos;
        let s = c.f32s(dim, "state")?;
        let a = c.f32s(2, "action")?;
        let r = c.f32s(1, "reward")?[0];
        let s_next = c.f32s(dim, "next state")?;
        let flags = c.take(2, "flags")?;
        let done = match flags[0] {
            0 => false,
            1 => true,
            _ => return Err(DataError::Format { offset: start as u64, message: "done flag is not 0/1".into() }),
        };
        let outcome = Outcome::from_code(flags[1])
            .ok_or_else(|| DataError::Format { offset: start as u64, message: "unknown outcome code".into() })?;
        let traj_id = c.u64("trajectory id")?;
        let t = c.u32("step index")?;
        let expected = if i < n_exp { Outcome::Success } else { Outcome::Collision };
        if outcome != expected {
            return Err(DataError::Format { offset: start as u64, message: "record label disagrees with its partition".into() });
        }
        let tr = Transition { s, a: [a[0], a[1]], r, s_next, done, outcome, traj_id, t };
        if i < n_exp {
            ds.exp.push(tr);
        } else {
            ds.col.push(tr);
        }
    }
    Ok(ds)
}
