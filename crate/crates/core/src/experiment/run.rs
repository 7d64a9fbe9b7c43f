use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::compare::{median_band, seed_curves};
use super::config::{Algorithm, ExperimentConfig};
use super::record::{
    write_csv, write_metrics, EpochRecord, GenerationRecord, PruneRecord, SeedEvents, SeedStatus, SeedSummary,
};
use super::svg::{render, Panel, Series};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::eval::{evaluate_accuracy, CostEvaluator};
use crate::net::Shape;
use crate::population::{GrwcDriver, GrwcParams};
use crate::prune::{prune_population, PrunePolicy};
use crate::rng::RngStream;
use crate::rwc::{init_candidate, rwc_step, Candidate};
use crate::snapshot::ModelSnapshot;

pub const MANIFEST_VERSION: u32 = 1;

/// Contents of `run.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub task: String,
    /// Name of the training set, e.g. `mnist-1000`.
    pub dataset: String,
    pub algorithm: Algorithm,
    /// Cost evaluations per epoch: the population size, or 1 for RWC.
    pub pop_size: usize,
    pub shape: [usize; 3],
    pub seeds: Vec<u64>,
}

impl RunManifest {
    pub fn load(run_dir: &Path) -> Result<Self> {
        let path = run_dir.join("run.json");
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let m: RunManifest = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.clone(),
            detail: e.to_string(),
        })?;
        if m.schema_version != MANIFEST_VERSION {
            return Err(Error::Format {
                path,
                detail: format!("unsupported schema_version {}", m.schema_version),
            });
        }
        Ok(m)
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub dir: PathBuf,
    pub manifest: RunManifest,
    pub seeds: Vec<SeedSummary>,
}

impl RunReport {
    pub fn failed(&self) -> impl Iterator<Item = &SeedSummary> {
        self.seeds.iter().filter(|s| s.status == SeedStatus::Failed)
    }
}

pub fn seed_dir(run_dir: &Path, k: usize) -> PathBuf {
    run_dir.join(format!("seed_{k:03}"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Trains every seed of `cfg` and writes the run directory.
///
/// A seed that fails numerically keeps the metrics and events recorded up to
/// the failure and is marked `failed` in `summary.csv`; the other seeds still
/// run. Errors writing artifacts abort the whole run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let (train, test) = cfg.datasets()?;
    let shape = cfg.shape(&train)?;
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    fs::write(dir.join("config.toml"), cfg.to_toml()).map_err(|e| Error::io(dir.join("config.toml"), e))?;
    let manifest = RunManifest {
        schema_version: MANIFEST_VERSION,
        task: format!("{:?}", cfg.task).to_lowercase(),
        dataset: train.name().to_string(),
        algorithm: cfg.algorithm,
        pop_size: match cfg.algorithm {
            Algorithm::Rwc => 1,
            _ => cfg.grwc.pop_size,
        },
        shape: [shape.n_in, shape.n_hidden, shape.n_out],
        seeds: (0..cfg.n_seeds).map(|k| cfg.seed(k)).collect(),
    };
    write_json(&dir.join("run.json"), &manifest)?;

    let eval = CostEvaluator::new(&train);
    let job = |k: usize| run_seed(cfg, k, shape, &eval, &train, test.as_ref(), &seed_dir(&dir, k));
    let seeds: Vec<SeedSummary> = if cfg.grwc.parallel {
        (0..cfg.n_seeds).into_par_iter().map(job).collect::<Result<_>>()?
    } else {
        (0..cfg.n_seeds).map(job).collect::<Result<_>>()?
    };
    write_csv(&dir.join("summary.csv"), &seeds)?;

    let curves = seed_curves(&dir, &seeds)?;
    let (median, lo, hi) = median_band(&curves);
    let label = format!("{} ({} seeds, median)", cfg.algorithm.as_str(), curves.len());
    let svg = render(&[Panel {
        title: format!("{} on {}", cfg.algorithm.as_str(), train.name()),
        x_label: "epoch".into(),
        y_label: "best cost".into(),
        series: vec![Series {
            label,
            line: median.iter().enumerate().map(|(i, &y)| ((i + 1) as f64, y)).collect(),
            band: lo
                .iter()
                .zip(&hi)
                .enumerate()
                .map(|(i, (&l, &h))| ((i + 1) as f64, l, h))
                .collect(),
        }],
    }]);
    fs::write(dir.join("curve.svg"), svg).map_err(|e| Error::io(dir.join("curve.svg"), e))?;

    Ok(RunReport { dir, manifest, seeds })
}

/// Everything a seed produces, filled in as training advances so that a
/// failure still leaves the partial record.
struct SeedState {
    records: Vec<EpochRecord>,
    events: SeedEvents,
    model: Option<ModelSnapshot>,
    evaluations: u64,
}

impl SeedState {
    fn epoch(&self) -> usize {
        self.records.len()
    }
}

fn snapshot(c: &Candidate) -> ModelSnapshot {
    ModelSnapshot {
        net: c.net.clone(),
        mask: c.mask.clone(),
    }
}

fn run_seed(
    cfg: &ExperimentConfig,
    k: usize,
    shape: Shape,
    eval: &CostEvaluator,
    train: &Dataset,
    test: Option<&Dataset>,
    dir: &Path,
) -> Result<SeedSummary> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let seed = cfg.seed(k);
    let mut st = SeedState {
        records: Vec::new(),
        events: SeedEvents::default(),
        model: None,
        evaluations: 0,
    };
    let outcome = match cfg.algorithm {
        Algorithm::Rwc => train_rwc_seed(cfg, shape, eval, seed, &mut st),
        Algorithm::Grwc | Algorithm::GrwcPrune => train_grwc_seed(cfg, shape, eval, seed, dir, &mut st),
    };

    write_metrics(&dir.join("metrics.csv"), &st.records)?;
    write_json(&dir.join("events.json"), &st.events)?;
    if let Some(m) = &st.model {
        m.save(&dir.join("model.bin"))?;
    }

    let accuracy = |ds: Option<&Dataset>| -> Result<Option<f64>> {
        match (&st.model, ds) {
            (Some(m), Some(ds)) if outcome.is_ok() => Ok(Some(evaluate_accuracy(&m.net, ds)?)),
            _ => Ok(None),
        }
    };
    let prune = st.events.prune;
    Ok(SeedSummary {
        seed_index: k,
        seed,
        status: if outcome.is_ok() {
            SeedStatus::Ok
        } else {
            SeedStatus::Failed
        },
        epochs: st.epoch(),
        evaluations: st.evaluations,
        final_cost: st.records.last().map(|r| r.best_cost).filter(|_| outcome.is_ok()),
        train_accuracy: accuracy(Some(train))?,
        test_accuracy: accuracy(test)?,
        kept_weights: st.records.last().map_or(shape.weight_count(), |r| r.kept_weights),
        total_weights: shape.weight_count(),
        prune_after_epoch: prune.map(|p| p.after_epoch),
        pre_prune_cost: prune.map(|p| p.pre_cost),
        post_prune_cost: prune.map(|p| p.post_cost),
        error: outcome.err().map(|e| e.to_string()),
    })
}

fn train_rwc_seed(
    cfg: &ExperimentConfig,
    shape: Shape,
    eval: &CostEvaluator,
    seed: u64,
    st: &mut SeedState,
) -> Result<()> {
    let params = cfg.rwc_params()?;
    let start = Instant::now();
    let mut rng = RngStream::new(seed, 0);
    let mut c = init_candidate(shape, &params, &mut rng)?;
    c.evaluate(eval)?;
    st.evaluations = 1;
    let kept = c.kept_weights();
    for _ in 0..cfg.rwc_epochs() {
        let step = rwc_step(&mut c, eval, &params, &mut rng);
        // A failed step leaves the candidate as it was, so it is still the
        // best model reached.
        st.model = Some(snapshot(&c));
        step?;
        st.evaluations += 1;
        st.records.push(EpochRecord {
            epoch: st.epoch() + 1,
            best_cost: c.last_cost,
            evaluations_so_far: st.evaluations,
            kept_weights: kept,
            wall_ms: elapsed_ms(start),
        });
    }
    st.model = Some(snapshot(&c));
    Ok(())
}

fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

fn train_grwc_seed(
    cfg: &ExperimentConfig,
    shape: Shape,
    eval: &CostEvaluator,
    seed: u64,
    dir: &Path,
    st: &mut SeedState,
) -> Result<()> {
    let params: GrwcParams = cfg.grwc_params()?;
    let policy: Option<PrunePolicy> = match cfg.algorithm {
        Algorithm::GrwcPrune => Some(cfg.prune_config().policy()?),
        _ => None,
    };
    let finetune = cfg.prune_config().finetune_generations;
    let start = Instant::now();
    let mut driver = GrwcDriver::new(shape, params, eval, seed)?;
    st.evaluations = driver.population().evaluations();
    st.model = Some(snapshot(driver.population().best()));

    let mut remaining = params.generations;
    while remaining > 0 {
        generation(&mut driver, cfg, dir, start, st)?;
        remaining -= 1;
        if let Some(policy) = &policy {
            if st.events.prune.is_none() && driver.population().best_cost() < policy.trigger_cost {
                let (mut population, _, selections) = driver.into_parts();
                st.events.selections.extend(selections);
                let report = prune_population(&mut population, policy, eval)?;
                st.evaluations = population.evaluations();
                st.events.prune = Some(PruneRecord {
                    after_epoch: st.epoch(),
                    pre_cost: report.pre_cost,
                    post_cost: report.post_cost,
                    summary: report.summary,
                    removed_fraction: report.summary.removed_fraction(),
                });
                st.model = Some(snapshot(population.best()));
                driver = GrwcDriver::resume(population, params, eval);
                remaining = finetune;
                continue;
            }
        }
        if st.events.prune.is_none() && driver.reached_stop() {
            break;
        }
    }
    st.events.selections.extend(driver.events().iter().copied());
    Ok(())
}

/// One GRWC round with its per-epoch records, event log and snapshot.
fn generation(
    driver: &mut GrwcDriver<'_>,
    cfg: &ExperimentConfig,
    dir: &Path,
    start: Instant,
    st: &mut SeedState,
) -> Result<()> {
    let pop = driver.population().len() as u64;
    let base_evals = driver.population().evaluations();
    let kept = driver.population().best().kept_weights();
    let t0 = elapsed_ms(start);
    let trace = driver.step()?.to_vec();
    let t1 = elapsed_ms(start);
    let n = trace.len();
    for (i, &cost) in trace.iter().enumerate() {
        // Epochs inside a generation run concurrently; their times are
        // interpolated across the generation.
        let wall = t0 + (t1 - t0) * (i + 1) as f64 / n as f64;
        st.records.push(EpochRecord {
            epoch: st.epoch() + 1,
            best_cost: cost,
            evaluations_so_far: base_evals + pop * (i as u64 + 1),
            kept_weights: kept,
            wall_ms: (wall * 1e3).round() / 1e3,
        });
    }
    let p = driver.population();
    st.evaluations = p.evaluations();
    st.events.generations.push(GenerationRecord {
        generation: p.generation(),
        end_epoch: st.epoch(),
        best_cost: p.best_cost(),
        mask_respected: p.candidates().iter().all(|c| c.respects_mask()),
    });
    let snap = snapshot(p.best());
    if cfg.snapshot_every_generation {
        snap.save(&dir.join(format!("gen_{:04}.bin", p.generation())))?;
    }
    st.model = Some(snap);
    Ok(())
}
