//! Genetic layer over RWC learners.
//!
//! A population of candidates trains independently for a generation; the two
//! lowest-cost members are then copied into the first and second half of the
//! population. Random streams are positional: slot `i` always draws from
//! stream `i` of the master seed, whatever weights it holds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::CostEvaluator;
use crate::net::Shape;
use crate::rng::RngStream;
use crate::rwc::{init_candidate, run_steps, Candidate, RwcParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrwcParams {
    pub pop_size: usize,
    pub epochs_per_generation: usize,
    pub generations: usize,
    #[serde(skip)]
    pub rwc: RwcParams,
    /// Training stops once the best cost falls strictly below this value.
    pub stop_cost: f64,
    /// Advance candidates on the rayon pool. Results do not depend on it.
    pub parallel: bool,
}

impl Default for GrwcParams {
    fn default() -> Self {
        GrwcParams {
            pop_size: 8,
            epochs_per_generation: 1000,
            generations: 20,
            rwc: RwcParams::default(),
            stop_cost: 0.0,
            parallel: true,
        }
    }
}

impl GrwcParams {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 2 || !self.pop_size.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "pop_size must be even and >= 2, got {}",
                self.pop_size
            )));
        }
        if self.epochs_per_generation == 0 || self.generations == 0 {
            return Err(Error::Config(
                "epochs_per_generation and generations must be >= 1".into(),
            ));
        }
        if !(self.stop_cost >= 0.0) {
            return Err(Error::Config(format!("stop_cost must be >= 0, got {}", self.stop_cost)));
        }
        self.rwc.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    candidates: Vec<Candidate>,
    streams: Vec<RngStream>,
    generation: usize,
    best_cost: f64,
    evaluations: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub index1: usize,
    pub index2: usize,
}

/// Record of one selection: which members were copied and their costs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionEvent {
    pub generation: usize,
    pub index1: usize,
    pub index2: usize,
    pub cost1: f64,
    pub cost2: f64,
}

impl Population {
    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Completed generations.
    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn best_cost(&self) -> f64 {
        self.best_cost
    }

    /// Dataset evaluations spent so far by all members.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn shape(&self) -> Shape {
        self.candidates[0].net.shape
    }

    /// Lowest-cost member, lowest index on ties.
    pub fn best(&self) -> &Candidate {
        &self.candidates[select_best_two(self).index1]
    }

    pub(crate) fn candidates_mut(&mut self) -> &mut [Candidate] {
        &mut self.candidates
    }

    pub(crate) fn add_evaluations(&mut self, n: u64) {
        self.evaluations += n;
    }

    pub(crate) fn refresh_best(&mut self) {
        self.best_cost = self
            .candidates
            .iter()
            .map(|c| c.last_cost)
            .fold(f64::INFINITY, f64::min);
    }
}

/// Creates and evaluates `pop_size` candidates; member `i` uses stream `i`.
pub fn init_population(
    shape: Shape,
    params: &GrwcParams,
    eval: &CostEvaluator,
    master_seed: u64,
) -> Result<Population> {
    params.validate()?;
    let mut candidates = Vec::with_capacity(params.pop_size);
    let mut streams = Vec::with_capacity(params.pop_size);
    for i in 0..params.pop_size {
        let mut rng = RngStream::new(master_seed, i as u64);
        let mut c = init_candidate(shape, &params.rwc, &mut rng)?;
        c.evaluate(eval).map_err(|e| tag_candidate(e, i))?;
        candidates.push(c);
        streams.push(rng);
    }
    let mut pop = Population {
        candidates,
        streams,
        generation: 0,
        best_cost: f64::INFINITY,
        evaluations: params.pop_size as u64,
    };
    pop.refresh_best();
    Ok(pop)
}

fn tag_candidate(e: Error, index: usize) -> Error {
    match e {
        Error::Numeric { detail, .. } => Error::Numeric {
            candidate: Some(index),
            detail,
        },
        other => other,
    }
}

/// Advances every member by `epochs_per_generation` RWC steps.
///
/// Returns the population-best cost after each epoch. Members are independent
/// and merged positionally, so parallel and sequential runs are identical.
pub fn run_generation(p: &mut Population, eval: &CostEvaluator, params: &GrwcParams) -> Result<Vec<f64>> {
    let epochs = params.epochs_per_generation;
    let rwc = params.rwc;
    let work = |(i, (c, rng)): (usize, (&mut Candidate, &mut RngStream))| {
        run_steps(c, eval, &rwc, rng, epochs).map_err(|e| tag_candidate(e, i))
    };
    let traces: Vec<Result<Vec<f64>>> = if params.parallel {
        p.candidates
            .par_iter_mut()
            .zip(p.streams.par_iter_mut())
            .enumerate()
            .map(work)
            .collect()
    } else {
        p.candidates
            .iter_mut()
            .zip(p.streams.iter_mut())
            .enumerate()
            .map(work)
            .collect()
    };
    let traces = traces.into_iter().collect::<Result<Vec<_>>>()?;
    let mut best = vec![f64::INFINITY; epochs];
    for trace in &traces {
        for (b, &c) in best.iter_mut().zip(trace) {
            *b = b.min(c);
        }
    }
    p.evaluations += (p.len() * epochs) as u64;
    p.generation += 1;
    p.refresh_best();
    Ok(best)
}

/// Indices of the lowest and second-lowest cost; lower index wins ties.
pub fn select_best_two(p: &Population) -> SelectionResult {
    select_from_costs(&p.candidates.iter().map(|c| c.last_cost).collect::<Vec<_>>())
}

/// Selection on a bare cost vector (at least two entries).
pub fn select_from_costs(costs: &[f64]) -> SelectionResult {
    assert!(costs.len() >= 2, "selection needs at least two members");
    let (mut first, mut second) = if costs[1] < costs[0] { (1, 0) } else { (0, 1) };
    for (i, &c) in costs.iter().enumerate().skip(2) {
        if c < costs[first] {
            second = first;
            first = i;
        } else if c < costs[second] {
            second = i;
        }
    }
    SelectionResult {
        index1: first,
        index2: second,
    }
}

/// Refills the first half with copies of `index1` and the rest with `index2`.
pub fn reproduce(p: &mut Population, sel: SelectionResult) {
    let best = p.candidates[sel.index1].clone();
    let runner_up = p.candidates[sel.index2].clone();
    let half = p.len() / 2;
    for (i, slot) in p.candidates.iter_mut().enumerate() {
        *slot = if i < half { best.clone() } else { runner_up.clone() };
    }
    p.refresh_best();
}

/// Steps a population through generations, keeping the trace and event log.
pub struct GrwcDriver<'a> {
    eval: &'a CostEvaluator,
    params: GrwcParams,
    population: Population,
    trace: Vec<f64>,
    events: Vec<SelectionEvent>,
}

impl<'a> GrwcDriver<'a> {
    pub fn new(shape: Shape, params: GrwcParams, eval: &'a CostEvaluator, master_seed: u64) -> Result<Self> {
        let population = init_population(shape, &params, eval, master_seed)?;
        Ok(Self::resume(population, params, eval))
    }

    /// Continues from an existing population with an empty trace.
    pub fn resume(population: Population, params: GrwcParams, eval: &'a CostEvaluator) -> Self {
        GrwcDriver {
            eval,
            params,
            population,
            trace: Vec::new(),
            events: Vec::new(),
        }
    }

    /// One round: run the generation, select the best two, reproduce.
    /// Returns the epochs' best costs.
    pub fn step(&mut self) -> Result<&[f64]> {
        let start = self.trace.len();
        let gen_trace = run_generation(&mut self.population, self.eval, &self.params)?;
        self.trace.extend(gen_trace);
        let sel = select_best_two(&self.population);
        let c = self.population.candidates();
        self.events.push(SelectionEvent {
            generation: self.population.generation(),
            index1: sel.index1,
            index2: sel.index2,
            cost1: c[sel.index1].last_cost,
            cost2: c[sel.index2].last_cost,
        });
        reproduce(&mut self.population, sel);
        Ok(&self.trace[start..])
    }

    pub fn reached_stop(&self) -> bool {
        self.population.best_cost() < self.params.stop_cost
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn trace(&self) -> &[f64] {
        &self.trace
    }

    pub fn events(&self) -> &[SelectionEvent] {
        &self.events
    }

    pub fn into_parts(self) -> (Population, Vec<f64>, Vec<SelectionEvent>) {
        (self.population, self.trace, self.events)
    }
}

#[derive(Clone, Debug)]
pub struct GrwcRun {
    pub best: Candidate,
    /// Population-best cost after each epoch.
    pub trace: Vec<f64>,
    pub events: Vec<SelectionEvent>,
    pub population: Population,
}

/// Runs up to `generations` rounds, stopping early below `stop_cost`.
pub fn train_grwc(shape: Shape, params: &GrwcParams, eval: &CostEvaluator, master_seed: u64) -> Result<GrwcRun> {
    let mut driver = GrwcDriver::new(shape, *params, eval, master_seed)?;
    for _ in 0..params.generations {
        driver.step()?;
        if driver.reached_stop() {
            break;
        }
    }
    let (population, trace, events) = driver.into_parts();
    Ok(GrwcRun {
        best: population.best().clone(),
        trace,
        events,
        population,
    })
}
