//! Fixtures shared by the benchmarks.

use std::path::PathBuf;

use grwc_core::data::load_mnist;
use grwc_core::{init_candidate, Candidate, Dataset, Matrix, RngStream, RwcParams, Shape};

/// The first `n` bundled MNIST training images, or a synthetic stand-in of
/// the same shape and sparsity when the data directory is absent.
pub fn mnist_or_synthetic(n: usize) -> Dataset {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist");
    let images = root.join("train-images-idx3-ubyte.gz");
    let labels = root.join("train-labels-idx1-ubyte.gz");
    if let Ok(ds) = load_mnist(&images, &labels, Some(n)) {
        return ds;
    }
    let mut rng = RngStream::new(0xbe7c, 0);
    // About 20% of MNIST pixels are nonzero.
    let inputs = Matrix::from_fn(n, 784, |_, _| if rng.unit() < 0.2 { rng.unit() } else { 0.0 });
    let classes = (0..n).map(|i| i % 10).collect();
    Dataset::new("synthetic-mnist", inputs, classes, 10).expect("valid synthetic data")
}

pub fn candidate(shape: Shape, seed: u64) -> Candidate {
    init_candidate(shape, &RwcParams::default(), &mut RngStream::new(seed, 0)).expect("valid shape")
}
