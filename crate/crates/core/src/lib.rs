//! Genetic random weight change (GRWC) training for a two-layer sigmoid
//! network, the single-learner RWC baseline, and magnitude pruning with
//! fine-tuning.
//!
//! The modules map onto the pipeline: [`net`] and [`eval`] score a network,
//! [`rwc`] improves one candidate, [`population`] runs the genetic layer,
//! [`prune`] removes weak connections, [`data`] loads inputs and
//! [`experiment`] drives complete runs and writes their artifacts.

pub mod data;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod matrix;
pub mod net;
pub mod population;
pub mod prune;
pub mod rng;
pub mod rwc;
pub mod snapshot;

pub use data::Dataset;
pub use error::{Error, Result};
pub use eval::{evaluate_accuracy, CostEvaluator};
pub use matrix::Matrix;
pub use net::{dataset_cost, forward, predict_label, sample_cost, Activation, Hypothesis, Network, Sample, Shape};
pub use population::{
    init_population, reproduce, run_generation, select_best_two, select_from_costs, train_grwc, GrwcDriver, GrwcParams,
    GrwcRun, Population, SelectionEvent, SelectionResult,
};
pub use prune::{apply_mask, build_mask, prune_and_finetune, MaskSummary, PruneMask, PruneMode, PrunePolicy};
pub use rng::RngStream;
pub use rwc::{init_candidate, rwc_step, train_rwc, Candidate, RwcParams, RwcRun, StepOutcome};
pub use snapshot::ModelSnapshot;
