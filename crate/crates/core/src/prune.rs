//! Magnitude pruning with frozen zeros.
//!
//! Once the population's best cost drops below a trigger level, the weakest
//! connections of the best member are removed from every member. Removed
//! weights and their perturbations are pinned at exactly zero afterwards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::CostEvaluator;
use crate::net::{Network, Shape};
use crate::population::{GrwcDriver, GrwcParams, Population, SelectionEvent};
use crate::rwc::Candidate;

/// Per-connection keep flags for both weight matrices (row-major).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneMask {
    shape: Shape,
    keep1: Vec<bool>,
    keep2: Vec<bool>,
}

/// Kept and removed connection counts per layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskSummary {
    pub kept1: usize,
    pub removed1: usize,
    pub kept2: usize,
    pub removed2: usize,
}

impl MaskSummary {
    pub fn kept(&self) -> usize {
        self.kept1 + self.kept2
    }

    pub fn removed(&self) -> usize {
        self.removed1 + self.removed2
    }

    pub fn removed_fraction(&self) -> f64 {
        self.removed() as f64 / (self.kept() + self.removed()) as f64
    }
}

impl PruneMask {
    pub fn new(shape: Shape, keep1: Vec<bool>, keep2: Vec<bool>) -> Result<Self> {
        if keep1.len() != shape.n_hidden * shape.n_in || keep2.len() != shape.n_out * shape.n_hidden {
            return Err(Error::Shape(format!(
                "mask sizes {}/{} do not match shape {}x{}x{}",
                keep1.len(),
                keep2.len(),
                shape.n_in,
                shape.n_hidden,
                shape.n_out
            )));
        }
        for (layer, keep) in [(1, &keep1), (2, &keep2)] {
            if !keep.iter().any(|&k| k) {
                return Err(Error::Config(format!("mask removes every weight of layer {layer}")));
            }
        }
        Ok(PruneMask { shape, keep1, keep2 })
    }

    /// Mask that keeps every connection.
    pub fn full(shape: Shape) -> Self {
        PruneMask {
            shape,
            keep1: vec![true; shape.n_hidden * shape.n_in],
            keep2: vec![true; shape.n_out * shape.n_hidden],
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn keep1(&self) -> &[bool] {
        &self.keep1
    }

    pub fn keep2(&self) -> &[bool] {
        &self.keep2
    }

    pub fn kept(&self) -> usize {
        self.summary().kept()
    }

    pub fn summary(&self) -> MaskSummary {
        let count = |k: &[bool]| k.iter().filter(|&&v| v).count();
        let (k1, k2) = (count(&self.keep1), count(&self.keep2));
        MaskSummary {
            kept1: k1,
            removed1: self.keep1.len() - k1,
            kept2: k2,
            removed2: self.keep2.len() - k2,
        }
    }
}

/// How the magnitude cut-off is chosen, applied to each layer separately.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum PruneMode {
    /// Remove the `fraction` of weights with the smallest magnitude
    /// (rounded to the nearest count, ties broken by position).
    Quantile { fraction: f64 },
    /// Remove every weight with `|w| < magnitude_threshold`.
    Absolute { magnitude_threshold: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrunePolicy {
    /// Pruning fires once the best cost is strictly below this level.
    pub trigger_cost: f64,
    #[serde(flatten)]
    pub mode: PruneMode,
    /// Per-layer ceiling on the removed fraction in absolute mode.
    pub max_removed_fraction: f64,
}

impl Default for PrunePolicy {
    fn default() -> Self {
        PrunePolicy {
            trigger_cost: 0.1,
            mode: PruneMode::Quantile { fraction: 0.5 },
            max_removed_fraction: 0.9,
        }
    }
}

impl PrunePolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.trigger_cost > 0.0) {
            return Err(Error::Config(format!(
                "trigger_cost must be > 0, got {}",
                self.trigger_cost
            )));
        }
        if !(self.max_removed_fraction > 0.0 && self.max_removed_fraction < 1.0) {
            return Err(Error::Config(format!(
                "max_removed_fraction must lie in (0, 1), got {}",
                self.max_removed_fraction
            )));
        }
        match self.mode {
            PruneMode::Quantile { fraction } if !(0.0..=self.max_removed_fraction).contains(&fraction) => {
                Err(Error::Config(format!(
                    "quantile fraction {fraction} outside [0, max_removed_fraction]"
                )))
            }
            PruneMode::Absolute { magnitude_threshold } if !(magnitude_threshold >= 0.0) => Err(Error::Config(
                format!("magnitude_threshold must be >= 0, got {magnitude_threshold}"),
            )),
            _ => Ok(()),
        }
    }
}

/// Keep flags removing exactly `k` smallest-magnitude weights.
fn remove_smallest(weights: &[f64], k: usize) -> Vec<bool> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[a].abs().total_cmp(&weights[b].abs()).then(a.cmp(&b)));
    let mut keep = vec![true; weights.len()];
    for &i in &order[..k] {
        keep[i] = false;
    }
    keep
}

fn layer_keep(weights: &[f64], policy: &PrunePolicy) -> Vec<bool> {
    let n = weights.len();
    let cap = (policy.max_removed_fraction * n as f64).floor() as usize;
    match policy.mode {
        PruneMode::Quantile { fraction } => {
            let k = ((fraction * n as f64).round() as usize).min(cap);
            remove_smallest(weights, k)
        }
        PruneMode::Absolute { magnitude_threshold } => {
            let keep: Vec<bool> = weights.iter().map(|w| w.abs() >= magnitude_threshold).collect();
            let removed = keep.iter().filter(|&&k| !k).count();
            if removed > cap {
                // lower the cut-off to the quantile that removes exactly `cap`
                remove_smallest(weights, cap)
            } else {
                keep
            }
        }
    }
}

pub fn build_mask(net: &Network, policy: &PrunePolicy) -> Result<PruneMask> {
    policy.validate()?;
    net.validate()?;
    PruneMask::new(
        net.shape,
        layer_keep(net.theta1.as_slice(), policy),
        layer_keep(net.theta2.as_slice(), policy),
    )
}

/// Zeroes masked weights and perturbations, attaches the mask and
/// re-evaluates the candidate. Returns the new cost.
pub fn apply_mask(c: &mut Candidate, mask: &PruneMask, eval: &CostEvaluator) -> Result<f64> {
    if mask.shape != c.net.shape {
        return Err(Error::Shape("mask shape does not match candidate".into()));
    }
    let zero = |w: &mut [f64], d: &mut [f64], keep: &[bool]| {
        for ((w, d), &k) in w.iter_mut().zip(d.iter_mut()).zip(keep) {
            if !k {
                *w = 0.0;
                *d = 0.0;
            }
        }
    };
    zero(c.net.theta1.as_mut_slice(), c.delta1.as_mut_slice(), &mask.keep1);
    zero(c.net.theta2.as_mut_slice(), c.delta2.as_mut_slice(), &mask.keep2);
    c.mask = Some(mask.clone());
    c.evaluate(eval)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneReport {
    /// Population best cost just before masking.
    pub pre_cost: f64,
    /// Population best cost right after masking and re-evaluation.
    pub post_cost: f64,
    pub summary: MaskSummary,
}

#[derive(Clone, Debug)]
pub struct PruneOutcome {
    pub population: Population,
    /// Best cost after each fine-tuning epoch.
    pub trace: Vec<f64>,
    pub events: Vec<SelectionEvent>,
    pub report: PruneReport,
}

/// Masks the whole population and returns it without further training.
pub fn prune_population(p: &mut Population, policy: &PrunePolicy, eval: &CostEvaluator) -> Result<PruneReport> {
    if !(p.best_cost() < policy.trigger_cost) {
        return Err(Error::Usage(format!(
            "best cost {} has not reached the prune trigger {}",
            p.best_cost(),
            policy.trigger_cost
        )));
    }
    let pre_cost = p.best_cost();
    let mask = build_mask(&p.best().net, policy)?;
    for c in p.candidates_mut() {
        apply_mask(c, &mask, eval)?;
    }
    p.add_evaluations(p.len() as u64);
    p.refresh_best();
    Ok(PruneReport {
        pre_cost,
        post_cost: p.best_cost(),
        summary: mask.summary(),
    })
}

/// Prunes with a mask built from the best member, then runs
/// `finetune_generations` more GRWC rounds.
pub fn prune_and_finetune(
    mut p: Population,
    policy: &PrunePolicy,
    params: &GrwcParams,
    eval: &CostEvaluator,
    finetune_generations: usize,
) -> Result<PruneOutcome> {
    let report = prune_population(&mut p, policy, eval)?;
    let mut driver = GrwcDriver::resume(p, *params, eval);
    for _ in 0..finetune_generations {
        driver.step()?;
    }
    let (population, trace, events) = driver.into_parts();
    Ok(PruneOutcome {
        population,
        trace,
        events,
        report,
    })
}
