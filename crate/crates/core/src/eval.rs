//! Full-dataset cost evaluation on the training hot path.
//!
//! Inputs are stored sparsely (MNIST is ~80% zero pixels) and the first
//! layer is walked pixel-major over a transposed copy of `theta1`. Each
//! hidden unit still accumulates its terms in increasing input index, and a
//! skipped `w * 0.0` term never changes a running sum, so the result is
//! bit-identical to [`crate::net::dataset_cost`].

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::net::{argmax, check_dataset_shape, Network};

#[derive(Clone, Debug)]
pub struct CostEvaluator {
    n_in: usize,
    n_out: usize,
    row_start: Vec<usize>,
    nz_index: Vec<u32>,
    nz_value: Vec<f64>,
    classes: Vec<usize>,
    name: String,
}

impl CostEvaluator {
    pub fn new(ds: &Dataset) -> Self {
        let mut row_start = Vec::with_capacity(ds.len() + 1);
        let mut nz_index = Vec::new();
        let mut nz_value = Vec::new();
        row_start.push(0);
        for i in 0..ds.len() {
            for (p, &v) in ds.input(i).iter().enumerate() {
                if v != 0.0 {
                    nz_index.push(p as u32);
                    nz_value.push(v);
                }
            }
            row_start.push(nz_index.len());
        }
        CostEvaluator {
            n_in: ds.n_in(),
            n_out: ds.n_out(),
            row_start,
            nz_index,
            nz_value,
            classes: ds.classes().to_vec(),
            name: ds.name().to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    fn check(&self, net: &Network) -> Result<()> {
        if self.n_in != net.shape.n_in || self.n_out != net.shape.n_out {
            return Err(Error::Shape(format!(
                "dataset is {}->{} but network is {}->{}",
                self.n_in, self.n_out, net.shape.n_in, net.shape.n_out
            )));
        }
        Ok(())
    }

    /// Calls `visit(sample, h)` with the normalized output of every sample.
    fn for_each_hypothesis(&self, net: &Network, mut visit: impl FnMut(usize, &[f64])) {
        let nh = net.shape.n_hidden;
        let f = net.activation;
        let mut w1t = vec![0.0; self.n_in * nh];
        for h in 0..nh {
            for (p, &w) in net.theta1.row(h).iter().enumerate() {
                w1t[p * nh + h] = w;
            }
        }
        let mut hidden = vec![0.0; nh];
        let mut out = vec![0.0; self.n_out];
        for s in 0..self.len() {
            hidden.fill(0.0);
            let (lo, hi) = (self.row_start[s], self.row_start[s + 1]);
            for (&p, &x) in self.nz_index[lo..hi].iter().zip(&self.nz_value[lo..hi]) {
                let col = &w1t[p as usize * nh..(p as usize + 1) * nh];
                for (acc, &w) in hidden.iter_mut().zip(col) {
                    *acc += w * x;
                }
            }
            for v in hidden.iter_mut() {
                *v = f.apply(*v);
            }
            for (o, z) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (&w, &a) in net.theta2.row(o).iter().zip(&hidden) {
                    acc += w * a;
                }
                *z = f.apply(acc);
            }
            let mut total = 0.0;
            for &z in out.iter() {
                total += z;
            }
            for z in out.iter_mut() {
                *z /= total;
            }
            visit(s, &out);
        }
    }

    /// Mean of `½‖h − y‖²` over all samples, summed in sample order.
    pub fn cost(&self, net: &Network) -> Result<f64> {
        self.check(net)?;
        let mut total = 0.0;
        self.for_each_hypothesis(net, |s, h| {
            let class = self.classes[s];
            let mut acc = 0.0;
            for (j, &v) in h.iter().enumerate() {
                let d = v - if j == class { 1.0 } else { 0.0 };
                acc += d * d;
            }
            total += 0.5 * acc;
        });
        let cost = total / self.len() as f64;
        if !cost.is_finite() {
            return Err(Error::Numeric {
                candidate: None,
                detail: format!("dataset cost evaluated to {cost}"),
            });
        }
        Ok(cost)
    }

    /// Fraction of samples whose argmax prediction equals the label.
    pub fn accuracy(&self, net: &Network) -> Result<f64> {
        self.check(net)?;
        let mut correct = 0usize;
        self.for_each_hypothesis(net, |s, h| {
            if argmax(h) == self.classes[s] {
                correct += 1;
            }
        });
        Ok(correct as f64 / self.len() as f64)
    }
}

/// Classification accuracy of `net` on `ds`.
pub fn evaluate_accuracy(net: &Network, ds: &Dataset) -> Result<f64> {
    check_dataset_shape(net, ds)?;
    CostEvaluator::new(ds).accuracy(net)
}
