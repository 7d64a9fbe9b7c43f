//! Datasets: MNIST IDX ingestion, synthetic generators and a binary cache.

mod cache;
mod idx;
mod synth;

pub use cache::{read_cache, write_cache};
pub use idx::{load_mnist, read_idx_images, read_idx_labels, IdxHeader, IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC};
pub use synth::{make_blobs, make_xor};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::net::Sample;
use crate::rng::RngStream;

/// Inputs in `[0, 1]` plus one-hot targets, one row per sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    inputs: Matrix,
    targets: Matrix,
    classes: Vec<usize>,
    name: String,
}

impl Dataset {
    /// Builds a dataset from inputs and class indices.
    pub fn new(name: impl Into<String>, inputs: Matrix, classes: Vec<usize>, n_classes: usize) -> Result<Self> {
        if inputs.rows() == 0 {
            return Err(Error::Usage("dataset must contain at least one sample".into()));
        }
        if inputs.rows() != classes.len() {
            return Err(Error::Consistency(format!(
                "{} input rows but {} labels",
                inputs.rows(),
                classes.len()
            )));
        }
        if inputs.cols() == 0 || n_classes == 0 {
            return Err(Error::Shape("dataset needs at least one feature and one class".into()));
        }
        if let Some(&c) = classes.iter().find(|&&c| c >= n_classes) {
            return Err(Error::Consistency(format!("label {c} outside 0..{n_classes}")));
        }
        if let Some(v) = inputs.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Usage(format!("input value {v} outside [0, 1]")));
        }
        let targets = Matrix::from_fn(classes.len(), n_classes, |i, j| if classes[i] == j { 1.0 } else { 0.0 });
        Ok(Dataset {
            inputs,
            targets,
            classes,
            name: name.into(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn n_in(&self) -> usize {
        self.inputs.cols()
    }

    pub fn n_out(&self) -> usize {
        self.targets.cols()
    }

    pub fn inputs(&self) -> &Matrix {
        &self.inputs
    }

    pub fn targets(&self) -> &Matrix {
        &self.targets
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn input(&self, i: usize) -> &[f64] {
        self.inputs.row(i)
    }

    pub fn target(&self, i: usize) -> &[f64] {
        self.targets.row(i)
    }

    pub fn class(&self, i: usize) -> usize {
        self.classes[i]
    }

    pub fn sample(&self, i: usize) -> Sample {
        Sample {
            x: self.input(i).to_vec(),
            y: self.target(i).to_vec(),
        }
    }

    /// First `k` samples in their stored order.
    pub fn truncate(&self, k: usize) -> Result<Dataset> {
        if k == 0 {
            return Err(Error::Usage("limit must be >= 1".into()));
        }
        let k = k.min(self.len());
        let n_in = self.n_in();
        let inputs = Matrix::from_vec(k, n_in, self.inputs.as_slice()[..k * n_in].to_vec());
        Dataset::new(self.name.clone(), inputs, self.classes[..k].to_vec(), self.n_out())
    }

    /// Seeded Fisher-Yates permutation of the samples.
    pub fn shuffled(&self, seed: u64) -> Dataset {
        let mut order: Vec<usize> = (0..self.len()).collect();
        let mut rng = RngStream::new(seed, 0x5348_5546);
        for i in (1..order.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            order.swap(i, j);
        }
        let n_in = self.n_in();
        let mut data = Vec::with_capacity(self.inputs.len());
        for &i in &order {
            data.extend_from_slice(self.input(i));
        }
        let classes = order.iter().map(|&i| self.classes[i]).collect();
        Dataset::new(
            self.name.clone(),
            Matrix::from_vec(self.len(), n_in, data),
            classes,
            self.n_out(),
        )
        .expect("permutation of a valid dataset")
    }
}
