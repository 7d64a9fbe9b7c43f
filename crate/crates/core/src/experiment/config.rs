use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{load_mnist, make_blobs, make_xor, Dataset};
use crate::error::{Error, Result};
use crate::net::Shape;
use crate::population::GrwcParams;
use crate::prune::{PruneMode, PrunePolicy};
use crate::rwc::RwcParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Mnist,
    Xor,
    Blobs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Rwc,
    Grwc,
    GrwcPrune,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Rwc => "rwc",
            Algorithm::Grwc => "grwc",
            Algorithm::GrwcPrune => "grwc_prune",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MnistConfig {
    pub train_images: PathBuf,
    pub train_labels: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_images: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_labels: Option<PathBuf>,
    /// First `limit` training records in file order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
    /// Shuffle the training file with this seed before applying `limit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shuffle_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlobsConfig {
    pub n_per_class: usize,
    pub n_classes: usize,
    pub spread: f64,
    pub seed: u64,
}

impl Default for BlobsConfig {
    fn default() -> Self {
        BlobsConfig {
            n_per_class: 30,
            n_classes: 3,
            spread: 0.08,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetConfig {
    pub hidden: usize,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig { hidden: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RwcConfig {
    /// δ
    pub delta_init: f64,
    /// λ
    pub lambda: f64,
}

impl Default for RwcConfig {
    fn default() -> Self {
        let p = RwcParams::default();
        RwcConfig {
            delta_init: p.delta_init,
            lambda: p.lambda,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PruneConfig {
    pub trigger_cost: f64,
    /// `"quantile"` or `"absolute"`.
    pub mode: String,
    pub fraction: f64,
    pub magnitude_threshold: f64,
    pub max_removed_fraction: f64,
    /// GRWC rounds run after the prune event.
    pub finetune_generations: usize,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            trigger_cost: 0.1,
            mode: "quantile".into(),
            fraction: 0.5,
            magnitude_threshold: 0.1,
            max_removed_fraction: 0.9,
            finetune_generations: 5,
        }
    }
}

impl PruneConfig {
    pub fn policy(&self) -> Result<PrunePolicy> {
        let mode = match self.mode.as_str() {
            "quantile" => PruneMode::Quantile {
                fraction: self.fraction,
            },
            "absolute" => PruneMode::Absolute {
                magnitude_threshold: self.magnitude_threshold,
            },
            other => return Err(Error::Config(format!("unknown prune mode {other:?}"))),
        };
        let policy = PrunePolicy {
            trigger_cost: self.trigger_cost,
            mode,
            max_removed_fraction: self.max_removed_fraction,
        };
        policy.validate()?;
        Ok(policy)
    }
}

/// One experiment: a task, an algorithm and its parameters, replicated over
/// `n_seeds` consecutive seeds starting at `master_seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "one")]
    pub n_seeds: usize,
    pub output_dir: PathBuf,
    /// RWC epoch budget; defaults to `generations * epochs_per_generation`
    /// so both algorithms see the same number of epochs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    /// Write the best member's snapshot after every generation.
    #[serde(default)]
    pub snapshot_every_generation: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mnist: Option<MnistConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blobs: Option<BlobsConfig>,
    #[serde(default)]
    pub net: NetConfig,
    #[serde(default)]
    pub rwc: RwcConfig,
    #[serde(default)]
    pub grwc: GrwcParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prune: Option<PruneConfig>,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and applies `key=value` overrides (dotted keys,
    /// TOML literal values; bare words are taken as strings).
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut table: toml::Table =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_seeds == 0 {
            return Err(Error::Config("n_seeds must be >= 1".into()));
        }
        if self.net.hidden == 0 {
            return Err(Error::Config("net.hidden must be >= 1".into()));
        }
        if self.epochs == Some(0) {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        self.rwc_params()?;
        self.grwc_params()?.validate()?;
        match (self.algorithm, &self.prune) {
            (Algorithm::GrwcPrune, p) => {
                p.clone().unwrap_or_default().policy()?;
            }
            (_, Some(_)) => {
                return Err(Error::Config(format!(
                    "[prune] is only valid with algorithm = \"grwc_prune\", not {:?}",
                    self.algorithm.as_str()
                )))
            }
            _ => {}
        }
        match (self.task, &self.mnist, &self.blobs) {
            (Task::Mnist, None, _) => Err(Error::Config("task = \"mnist\" needs an [mnist] section".into())),
            (Task::Mnist, Some(m), _) if m.test_images.is_some() != m.test_labels.is_some() => Err(Error::Config(
                "mnist.test_images and mnist.test_labels go together".into(),
            )),
            (Task::Mnist, Some(m), _) if m.limit == Some(0) => Err(Error::Config("mnist.limit must be >= 1".into())),
            (t, Some(_), _) if t != Task::Mnist => Err(Error::Config("[mnist] given for a non-mnist task".into())),
            (t, _, Some(_)) if t != Task::Blobs => Err(Error::Config("[blobs] given for a non-blobs task".into())),
            _ => Ok(()),
        }
    }

    pub fn rwc_params(&self) -> Result<RwcParams> {
        RwcParams::new(self.rwc.delta_init, self.rwc.lambda)
    }

    pub fn grwc_params(&self) -> Result<GrwcParams> {
        Ok(GrwcParams {
            rwc: self.rwc_params()?,
            ..self.grwc
        })
    }

    pub fn prune_config(&self) -> PruneConfig {
        self.prune.clone().unwrap_or_default()
    }

    pub fn rwc_epochs(&self) -> usize {
        self.epochs
            .unwrap_or(self.grwc.generations * self.grwc.epochs_per_generation)
    }

    /// Seed used by replicate `k`.
    pub fn seed(&self, k: usize) -> u64 {
        self.master_seed.wrapping_add(k as u64)
    }

    pub fn shape(&self, train: &Dataset) -> Result<Shape> {
        Shape::new(train.n_in(), self.net.hidden, train.n_out())
    }

    /// Loads the training set and, when available, a held-out test set.
    pub fn datasets(&self) -> Result<(Dataset, Option<Dataset>)> {
        match self.task {
            Task::Xor => Ok((make_xor(), Some(make_xor()))),
            Task::Blobs => {
                let b = self.blobs.clone().unwrap_or_default();
                let train = make_blobs(b.n_per_class, b.n_classes, b.spread, b.seed)?;
                let test = make_blobs(b.n_per_class, b.n_classes, b.spread, b.seed.wrapping_add(1))?;
                Ok((train, Some(test)))
            }
            Task::Mnist => {
                let m = self.mnist.as_ref().expect("validated");
                let train = match m.shuffle_seed {
                    None => load_mnist(&m.train_images, &m.train_labels, m.limit)?,
                    Some(seed) => {
                        let full = load_mnist(&m.train_images, &m.train_labels, None)?.shuffled(seed);
                        let n = m.limit.unwrap_or(full.len());
                        full.truncate(n)?.renamed(format!("mnist-{n}-shuffled{seed}"))
                    }
                };
                let test = match (&m.test_images, &m.test_labels) {
                    (Some(i), Some(l)) => Some(load_mnist(i, l, None)?.renamed("mnist-test")),
                    _ => None,
                };
                Ok((train, test))
            }
        }
    }
}

fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Usage(format!("override {assignment:?} is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() {
        return Err(Error::Usage(format!("override {assignment:?} has an empty key")));
    }
    let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("split yields one part");
    let mut node = table;
    for part in parts {
        node = node
            .entry(part)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Usage(format!("override {key:?}: {part:?} is not a table")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}
