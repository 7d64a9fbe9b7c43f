//! Random weight change: perturb every weight by `ΔΘ`, keep the move and the
//! direction while the cost strictly falls, otherwise roll back and redraw
//! `ΔΘ = λ·u` with `u ~ U[-1, 1)` per entry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::CostEvaluator;
use crate::matrix::Matrix;
use crate::net::{Network, Shape};
use crate::prune::PruneMask;
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RwcParams {
    /// Scale of the initial weights and perturbations (δ).
    pub delta_init: f64,
    /// Scale of a redrawn perturbation after a rejected move (λ).
    pub lambda: f64,
}

impl Default for RwcParams {
    fn default() -> Self {
        RwcParams {
            delta_init: 0.3,
            lambda: 0.01,
        }
    }
}

impl RwcParams {
    pub fn new(delta_init: f64, lambda: f64) -> Result<Self> {
        let p = RwcParams { delta_init, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("delta_init", self.delta_init), ("lambda", self.lambda)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// One population member: weights, current perturbation and its cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub net: Network,
    pub delta1: Matrix,
    pub delta2: Matrix,
    /// Cost of `net`; `f64::INFINITY` until first evaluated.
    pub last_cost: f64,
    pub mask: Option<PruneMask>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted,
    Rejected,
}

impl Candidate {
    pub fn is_evaluated(&self) -> bool {
        self.last_cost.is_finite()
    }

    pub fn evaluate(&mut self, eval: &CostEvaluator) -> Result<f64> {
        self.last_cost = eval.cost(&self.net)?;
        Ok(self.last_cost)
    }

    /// Number of weights not removed by the mask.
    pub fn kept_weights(&self) -> usize {
        match &self.mask {
            Some(m) => m.kept(),
            None => self.net.shape.weight_count(),
        }
    }

    /// True if every masked position is exactly zero in weights and deltas.
    pub fn respects_mask(&self) -> bool {
        let Some(mask) = &self.mask else {
            return true;
        };
        let zero_where_removed = |keep: &[bool], a: &Matrix, b: &Matrix| {
            keep.iter()
                .zip(a.iter().zip(b.iter()))
                .all(|(&k, (&w, &d))| k || (w == 0.0 && d == 0.0))
        };
        zero_where_removed(mask.keep1(), &self.net.theta1, &self.delta1)
            && zero_where_removed(mask.keep2(), &self.net.theta2, &self.delta2)
    }

    fn redraw_deltas(&mut self, lambda: f64, rng: &mut RngStream) {
        let (keep1, keep2) = match &self.mask {
            Some(m) => (Some(m.keep1()), Some(m.keep2())),
            None => (None, None),
        };
        redraw(self.delta1.as_mut_slice(), keep1, lambda, rng);
        redraw(self.delta2.as_mut_slice(), keep2, lambda, rng);
    }
}

// Removed connections draw nothing from the stream.
fn redraw(delta: &mut [f64], keep: Option<&[bool]>, scale: f64, rng: &mut RngStream) {
    match keep {
        None => delta.iter_mut().for_each(|d| *d = scale * rng.symmetric()),
        Some(keep) => {
            for (d, &k) in delta.iter_mut().zip(keep) {
                *d = if k { scale * rng.symmetric() } else { 0.0 };
            }
        }
    }
}

/// Draws weights and perturbations as `δ·u`; the cost is left unset.
///
/// Draw order: `theta1`, `theta2`, `delta1`, `delta2`, each row-major.
pub fn init_candidate(shape: Shape, params: &RwcParams, rng: &mut RngStream) -> Result<Candidate> {
    shape.validate()?;
    params.validate()?;
    let d = params.delta_init;
    let mut draw = |rows, cols| Matrix::from_fn(rows, cols, |_, _| d * rng.symmetric());
    let theta1 = draw(shape.n_hidden, shape.n_in);
    let theta2 = draw(shape.n_out, shape.n_hidden);
    let delta1 = draw(shape.n_hidden, shape.n_in);
    let delta2 = draw(shape.n_out, shape.n_hidden);
    Ok(Candidate {
        net: Network::from_weights(theta1, theta2)?,
        delta1,
        delta2,
        last_cost: f64::INFINITY,
        mask: None,
    })
}

/// Tries `Θ + ΔΘ`; keeps it only if the cost strictly decreases.
///
/// On rejection `Θ` and `last_cost` are untouched and `ΔΘ` is redrawn. On a
/// numeric failure the candidate is left exactly as it was.
pub fn rwc_step(
    c: &mut Candidate,
    eval: &CostEvaluator,
    params: &RwcParams,
    rng: &mut RngStream,
) -> Result<StepOutcome> {
    if !c.is_evaluated() {
        return Err(Error::Usage("candidate must be evaluated before stepping".into()));
    }
    let mut trial = c.net.clone();
    for (w, d) in trial.theta1.as_mut_slice().iter_mut().zip(c.delta1.iter()) {
        *w += d;
    }
    for (w, d) in trial.theta2.as_mut_slice().iter_mut().zip(c.delta2.iter()) {
        *w += d;
    }
    let cost = eval.cost(&trial)?;
    if cost < c.last_cost {
        c.net = trial;
        c.last_cost = cost;
        Ok(StepOutcome::Accepted)
    } else {
        c.redraw_deltas(params.lambda, rng);
        Ok(StepOutcome::Rejected)
    }
}

/// Advances a candidate `epochs` times, returning its cost after each step.
pub(crate) fn run_steps(
    c: &mut Candidate,
    eval: &CostEvaluator,
    params: &RwcParams,
    rng: &mut RngStream,
    epochs: usize,
) -> Result<Vec<f64>> {
    let mut trace = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        rwc_step(c, eval, params, rng)?;
        trace.push(c.last_cost);
    }
    Ok(trace)
}

#[derive(Clone, Debug)]
pub struct RwcRun {
    pub candidate: Candidate,
    /// Cost after each epoch; length equals the epoch count.
    pub trace: Vec<f64>,
    /// Initial cost before the first step.
    pub initial_cost: f64,
}

/// Single-candidate baseline: initialize, evaluate once, then `epochs` steps.
pub fn train_rwc(
    shape: Shape,
    params: &RwcParams,
    eval: &CostEvaluator,
    epochs: usize,
    rng: &mut RngStream,
) -> Result<RwcRun> {
    if epochs == 0 {
        return Err(Error::Usage("epochs must be >= 1".into()));
    }
    let mut candidate = init_candidate(shape, params, rng)?;
    let initial_cost = candidate.evaluate(eval)?;
    let trace = run_steps(&mut candidate, eval, params, rng, epochs)?;
    Ok(RwcRun {
        candidate,
        trace,
        initial_cost,
    })
}
