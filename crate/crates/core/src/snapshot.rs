//! Versioned binary model snapshot.
//!
//! Layout (little-endian): `b"GRWCMODL"`, `u32` version, `u32` n_in,
//! `u32` n_hidden, `u32` n_out, `u8` activation (0 = sigmoid), `u8` mask flag,
//! `theta1` then `theta2` as `f64` row-major, then if the flag is set one
//! byte per weight (1 = kept) in the same order.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::net::{Activation, Network, Shape};
use crate::prune::PruneMask;

const MAGIC: &[u8; 8] = b"GRWCMODL";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSnapshot {
    pub net: Network,
    pub mask: Option<PruneMask>,
}

impl ModelSnapshot {
    pub fn to_bytes(&self) -> Vec<u8> {
        let s = self.net.shape;
        let mut out = Vec::with_capacity(30 + s.weight_count() * 9);
        out.extend_from_slice(MAGIC);
        for v in [SNAPSHOT_VERSION, s.n_in as u32, s.n_hidden as u32, s.n_out as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.push(match self.net.activation {
            Activation::Sigmoid => 0,
        });
        out.push(self.mask.is_some() as u8);
        for w in self.net.theta1.iter().chain(self.net.theta2.iter()) {
            out.extend_from_slice(&w.to_le_bytes());
        }
        if let Some(m) = &self.mask {
            out.extend(m.keep1().iter().chain(m.keep2()).map(|&k| k as u8));
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let fmt = |detail: String| Error::Format {
            path: path.into(),
            detail,
        };
        if bytes.len() < 26 || &bytes[..8] != MAGIC {
            return Err(fmt("not a model snapshot".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[8 + 4 * i..12 + 4 * i].try_into().unwrap());
        let version = word(0);
        if version != SNAPSHOT_VERSION {
            return Err(fmt(format!("unsupported snapshot version {version}")));
        }
        let shape = Shape::new(word(1) as usize, word(2) as usize, word(3) as usize)?;
        let activation = match bytes[24] {
            0 => Activation::Sigmoid,
            a => return Err(fmt(format!("unknown activation tag {a}"))),
        };
        let has_mask = match bytes[25] {
            0 => false,
            1 => true,
            f => return Err(fmt(format!("bad mask flag {f}"))),
        };
        let n = shape.weight_count();
        let expected = 26 + 8 * n + if has_mask { n } else { 0 };
        if bytes.len() != expected {
            return Err(fmt(format!("expected {expected} bytes, found {}", bytes.len())));
        }
        let weights: Vec<f64> = bytes[26..26 + 8 * n]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let n1 = shape.n_hidden * shape.n_in;
        let mut net = Network::from_weights(
            Matrix::from_vec(shape.n_hidden, shape.n_in, weights[..n1].to_vec()),
            Matrix::from_vec(shape.n_out, shape.n_hidden, weights[n1..].to_vec()),
        )?;
        net.activation = activation;
        let mask = if has_mask {
            let flags: Vec<bool> = bytes[26 + 8 * n..].iter().map(|&b| b != 0).collect();
            Some(PruneMask::new(shape, flags[..n1].to_vec(), flags[n1..].to_vec())?)
        } else {
            None
        };
        Ok(ModelSnapshot { net, mask })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::rwc::{init_candidate, RwcParams};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip(seed in any::<u64>(), n_in in 1usize..9, n_hidden in 1usize..6, n_out in 1usize..5, masked in any::<bool>()) {
            let shape = Shape::new(n_in, n_hidden, n_out).unwrap();
            let mut rng = RngStream::new(seed, 0);
            let c = init_candidate(shape, &RwcParams::default(), &mut rng).unwrap();
            let mask = masked.then(|| {
                let mut k1 = vec![true; n_in * n_hidden];
                let mut k2 = vec![true; n_out * n_hidden];
                for (i, k) in k1.iter_mut().enumerate().skip(1) { *k = rng.unit() < 0.5 || i == 0; }
                for (i, k) in k2.iter_mut().enumerate().skip(1) { *k = rng.unit() < 0.5 || i == 0; }
                PruneMask::new(shape, k1, k2).unwrap()
            });
            let snap = ModelSnapshot { net: c.net, mask };
            let back = ModelSnapshot::from_bytes(&snap.to_bytes(), Path::new("mem")).unwrap();
            prop_assert_eq!(back, snap);
        }
    }

    #[test]
    fn rejects_corruption() {
        let shape = Shape::new(2, 2, 2).unwrap();
        let snap = ModelSnapshot {
            net: Network::zeros(shape),
            mask: None,
        };
        let bytes = snap.to_bytes();
        assert_eq!(bytes.len(), 26 + 8 * 8);
        let p = Path::new("mem");
        assert!(ModelSnapshot::from_bytes(&bytes[..bytes.len() - 1], p).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(ModelSnapshot::from_bytes(&bad, p).is_err());
        let mut bad = bytes;
        bad[8] = 9;
        assert!(ModelSnapshot::from_bytes(&bad, p).is_err());
    }
}
