use std::f64::consts::PI;

use rand_distr::{Distribution, Normal};

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::RngStream;

/// The four XOR cases; class is `a xor b`.
pub fn make_xor() -> Dataset {
    let inputs = Matrix::from_rows(&[&[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]]);
    Dataset::new("xor", inputs, vec![0, 1, 1, 0], 2).expect("static xor table")
}

/// Centre of class `k` out of `n`: evenly spaced on a circle of radius 0.35
/// around (0.5, 0.5).
pub(crate) fn blob_center(k: usize, n: usize) -> [f64; 2] {
    let angle = 2.0 * PI * k as f64 / n as f64;
    [0.5 + 0.35 * angle.cos(), 0.5 + 0.35 * angle.sin()]
}

/// Gaussian clusters in the unit square, clipped to `[0, 1]`.
///
/// Samples are interleaved by class (`0, 1, .., n_classes-1, 0, 1, ..`).
pub fn make_blobs(n_per_class: usize, n_classes: usize, spread: f64, seed: u64) -> Result<Dataset> {
    if n_per_class == 0 || n_classes < 2 {
        return Err(Error::Usage(format!(
            "blobs need n_per_class >= 1 and n_classes >= 2, got {n_per_class} and {n_classes}"
        )));
    }
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::Usage(format!("blob spread must be positive, got {spread}")));
    }
    let noise = Normal::new(0.0, spread).map_err(|e| Error::Usage(e.to_string()))?;
    let mut rng = RngStream::new(seed, 0x424c_4f42);
    let n = n_per_class * n_classes;
    let mut data = Vec::with_capacity(2 * n);
    let mut classes = Vec::with_capacity(n);
    for _ in 0..n_per_class {
        for k in 0..n_classes {
            let c = blob_center(k, n_classes);
            for axis in c {
                let v: f64 = axis + noise.sample(rng.as_rng());
                data.push(v.clamp(0.0, 1.0));
            }
            classes.push(k);
        }
    }
    Dataset::new(
        format!("blobs-{n_classes}x{n_per_class}"),
        Matrix::from_vec(n, 2, data),
        classes,
        n_classes,
    )
}
