//! Little-endian binary cache of a [`Dataset`].
//!
//! Layout: `b"GRWCDSET"`, `u32` version, `u32` name length, UTF-8 name,
//! `u64` samples, `u64` features, `u64` classes, `f64` inputs row-major,
//! `u32` class per sample.

use std::fs;
use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const MAGIC: &[u8; 8] = b"GRWCDSET";
const VERSION: u32 = 1;

pub fn write_cache(ds: &Dataset, path: &Path) -> Result<()> {
    let mut out = Vec::with_capacity(48 + ds.inputs().len() * 8 + ds.len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(ds.name().len() as u32).to_le_bytes());
    out.extend_from_slice(ds.name().as_bytes());
    for n in [ds.len(), ds.n_in(), ds.n_out()] {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for v in ds.inputs().iter() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for &c in ds.classes() {
        out.extend_from_slice(&(c as u32).to_le_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format {
                path: self.path.into(),
                detail: format!("truncated cache: need {n} bytes at offset {}", self.pos),
            })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<usize> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()) as usize)
    }
}

pub fn read_cache(path: &Path) -> Result<Dataset> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let fmt = |detail: String| Error::Format {
        path: path.into(),
        detail,
    };
    let mut cur = Cursor {
        bytes: &bytes,
        pos: 0,
        path,
    };
    if cur.take(8)? != MAGIC {
        return Err(fmt("not a dataset cache file".into()));
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(fmt(format!("unsupported cache version {version}")));
    }
    let name_len = cur.u32()? as usize;
    let name = String::from_utf8(cur.take(name_len)?.to_vec()).map_err(|e| fmt(e.to_string()))?;
    let (n, n_in, n_out) = (cur.u64()?, cur.u64()?, cur.u64()?);
    let raw = cur.take(n.saturating_mul(n_in).saturating_mul(8))?;
    let data = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let classes = cur
        .take(n.saturating_mul(4))?
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as usize)
        .collect();
    if cur.pos != bytes.len() {
        return Err(fmt(format!("{} trailing bytes", bytes.len() - cur.pos)));
    }
    Dataset::new(name, Matrix::from_vec(n, n_in, data), classes, n_out)
}
