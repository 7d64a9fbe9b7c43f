//! Two-layer network: `z2 = f(W1 x)`, `z3 = f(W2 z2)`, `h = z3 / sum(z3)`.
//!
//! The functions here are the straightforward reference path. Training uses
//! [`crate::eval::CostEvaluator`], which is checked bit-for-bit against them.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Layer widths of the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub n_in: usize,
    pub n_hidden: usize,
    pub n_out: usize,
}

impl Shape {
    pub fn new(n_in: usize, n_hidden: usize, n_out: usize) -> Result<Self> {
        let shape = Shape { n_in, n_hidden, n_out };
        shape.validate()?;
        Ok(shape)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_in == 0 || self.n_hidden == 0 || self.n_out == 0 {
            return Err(Error::Shape(format!(
                "all layer widths must be >= 1, got {}x{}x{}",
                self.n_in, self.n_hidden, self.n_out
            )));
        }
        Ok(())
    }

    /// Total number of connections (entries of both weight matrices).
    pub fn weight_count(&self) -> usize {
        self.n_hidden * self.n_in + self.n_out * self.n_hidden
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    /// Logistic `1 / (1 + e^-t)`; keeps every output strictly positive.
    #[default]
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply(self, t: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-t).exp()),
        }
    }
}

/// Weights of the two-layer network. No bias terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Network {
    /// `n_hidden x n_in`
    pub theta1: Matrix,
    /// `n_out x n_hidden`
    pub theta2: Matrix,
    pub shape: Shape,
    pub activation: Activation,
}

impl Network {
    pub fn zeros(shape: Shape) -> Self {
        Network {
            theta1: Matrix::zeros(shape.n_hidden, shape.n_in),
            theta2: Matrix::zeros(shape.n_out, shape.n_hidden),
            shape,
            activation: Activation::Sigmoid,
        }
    }

    pub fn from_weights(theta1: Matrix, theta2: Matrix) -> Result<Self> {
        let shape = Shape::new(theta1.cols(), theta1.rows(), theta2.rows())?;
        let net = Network {
            theta1,
            theta2,
            shape,
            activation: Activation::Sigmoid,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        let s = self.shape;
        if self.theta1.dims() != (s.n_hidden, s.n_in) || self.theta2.dims() != (s.n_out, s.n_hidden) {
            return Err(Error::Shape(format!(
                "weights {:?}/{:?} inconsistent with shape {}x{}x{}",
                self.theta1.dims(),
                self.theta2.dims(),
                s.n_in,
                s.n_hidden,
                s.n_out
            )));
        }
        if !(self.theta1.all_finite() && self.theta2.all_finite()) {
            return Err(Error::Numeric {
                candidate: None,
                detail: "non-finite weight".into(),
            });
        }
        Ok(())
    }

    /// Pre-normalization output `z3` for one input.
    pub fn output(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.shape.n_in {
            return Err(Error::Shape(format!(
                "input has {} features, network expects {}",
                x.len(),
                self.shape.n_in
            )));
        }
        let f = self.activation;
        let z2: Vec<f64> = (0..self.shape.n_hidden)
            .map(|h| f.apply(dot(self.theta1.row(h), x)))
            .collect();
        Ok((0..self.shape.n_out)
            .map(|o| f.apply(dot(self.theta2.row(o), &z2)))
            .collect())
    }
}

#[inline]
fn dot(w: &[f64], x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (a, b) in w.iter().zip(x) {
        acc += a * b;
    }
    acc
}

/// One labelled example.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Sample {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let ones = y.iter().filter(|&&v| v == 1.0).count();
        let zeros = y.iter().filter(|&&v| v == 0.0).count();
        if ones != 1 || ones + zeros != y.len() {
            return Err(Error::Usage("label vector must be one-hot".into()));
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Usage("input vector has non-finite entries".into()));
        }
        Ok(Sample { x, y })
    }
}

/// Normalized network output; entries sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis(pub Vec<f64>);

impl Hypothesis {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Index of the largest entry, lowest index on ties.
    pub fn argmax(&self) -> usize {
        argmax(&self.0)
    }
}

/// Divides every entry by the sum of all entries.
pub fn normalize(z: &[f64]) -> Vec<f64> {
    let mut total = 0.0;
    for v in z {
        total += v;
    }
    z.iter().map(|v| v / total).collect()
}

/// First index of the maximum; lowest index wins ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

pub fn forward(net: &Network, x: &[f64]) -> Result<Hypothesis> {
    Ok(Hypothesis(normalize(&net.output(x)?)))
}

/// `½ Σ_j (h_j − y_j)²`
pub fn squared_error(h: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (a, b) in h.iter().zip(y) {
        let d = a - b;
        acc += d * d;
    }
    0.5 * acc
}

pub fn sample_cost(net: &Network, s: &Sample) -> Result<f64> {
    if s.y.len() != net.shape.n_out {
        return Err(Error::Shape(format!(
            "label has {} classes, network has {} outputs",
            s.y.len(),
            net.shape.n_out
        )));
    }
    let h = forward(net, &s.x)?;
    Ok(squared_error(h.as_slice(), &s.y))
}

/// Mean sample cost, summed sequentially in sample order.
pub fn dataset_cost(net: &Network, ds: &Dataset) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::Usage("cannot evaluate cost on an empty dataset".into()));
    }
    check_dataset_shape(net, ds)?;
    let mut total = 0.0;
    for i in 0..ds.len() {
        let h = forward(net, ds.input(i))?;
        total += squared_error(h.as_slice(), ds.target(i));
    }
    Ok(total / ds.len() as f64)
}

pub fn predict_label(net: &Network, x: &[f64]) -> Result<usize> {
    Ok(forward(net, x)?.argmax())
}

pub(crate) fn check_dataset_shape(net: &Network, ds: &Dataset) -> Result<()> {
    if ds.n_in() != net.shape.n_in || ds.n_out() != net.shape.n_out {
        return Err(Error::Shape(format!(
            "dataset is {}->{} but network is {}->{}",
            ds.n_in(),
            ds.n_out(),
            net.shape.n_in,
            net.shape.n_out
        )));
    }
    Ok(())
}
