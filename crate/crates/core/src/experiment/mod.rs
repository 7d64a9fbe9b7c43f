//! Experiment harness: configuration, per-seed training runs, CSV/JSON/SVG
//! artifacts and cross-run comparison.
//!
//! A run directory holds `config.toml`, `run.json`, `summary.csv`,
//! `curve.svg` and one `seed_NNN/` directory per seed with `metrics.csv`,
//! `events.json` and `model.bin`.

mod compare;
mod config;
mod record;
mod run;
pub mod svg;

use std::path::Path;

pub use compare::{compare_runs, median, median_band, write_comparison, Comparison, RunCurves};
pub use config::{Algorithm, BlobsConfig, ExperimentConfig, MnistConfig, NetConfig, PruneConfig, RwcConfig, Task};
pub use record::{
    read_csv, read_metrics, write_csv, write_metrics, EpochRecord, GenerationRecord, PruneRecord, SeedEvents,
    SeedStatus, SeedSummary, METRICS_HEADER,
};
pub use run::{run_experiment, seed_dir, RunManifest, RunReport, MANIFEST_VERSION};

use crate::data::{load_mnist, Dataset};
use crate::error::Result;
use crate::eval::evaluate_accuracy;
use crate::snapshot::ModelSnapshot;

/// Accuracy of a snapshot on a dataset.
pub fn evaluate_test(model: &ModelSnapshot, test: &Dataset) -> Result<f64> {
    evaluate_accuracy(&model.net, test)
}

/// Loads a snapshot and an IDX image/label pair and scores it.
pub fn evaluate_files(model: &Path, images: &Path, labels: &Path) -> Result<(f64, usize)> {
    let snap = ModelSnapshot::load(model)?;
    let test = load_mnist(images, labels, None)?;
    Ok((evaluate_test(&snap, &test)?, test.len()))
}
