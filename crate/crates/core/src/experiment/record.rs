use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::SelectionEvent;
use crate::prune::MaskSummary;

pub const METRICS_HEADER: &str = "epoch,best_cost,evaluations_so_far,kept_weights,wall_ms";

/// One row of `metrics.csv`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based epoch count since the start of training.
    pub epoch: usize,
    pub best_cost: f64,
    /// Cost evaluations spent so far, including initialization.
    pub evaluations_so_far: u64,
    pub kept_weights: usize,
    /// Milliseconds since the seed started. Not reproducible.
    pub wall_ms: f64,
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.into(),
            detail: format!("{other:?}"),
        },
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| csv_error(path, e))).collect()
}

pub fn write_metrics(path: &Path, rows: &[EpochRecord]) -> Result<()> {
    if rows.is_empty() {
        // csv only emits the header alongside the first record.
        return std::fs::write(path, format!("{METRICS_HEADER}\n")).map_err(|e| Error::io(path, e));
    }
    write_csv(path, rows)
}

pub fn read_metrics(path: &Path) -> Result<Vec<EpochRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.lines().next() != Some(METRICS_HEADER) {
        return Err(Error::Format {
            path: path.into(),
            detail: format!("expected header {METRICS_HEADER:?}"),
        });
    }
    read_csv(path)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneRecord {
    /// Epoch count at which the mask was applied; the next row is the first
    /// fine-tuning epoch.
    pub after_epoch: usize,
    pub pre_cost: f64,
    pub post_cost: f64,
    pub summary: MaskSummary,
    pub removed_fraction: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub end_epoch: usize,
    pub best_cost: f64,
    /// Every member has exactly zero weight and step on removed connections.
    pub mask_respected: bool,
}

/// Contents of a seed's `events.json`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeedEvents {
    pub selections: Vec<SelectionEvent>,
    pub generations: Vec<GenerationRecord>,
    pub prune: Option<PruneRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedStatus {
    Ok,
    Failed,
}

/// One row of `summary.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed_index: usize,
    pub seed: u64,
    pub status: SeedStatus,
    pub epochs: usize,
    pub evaluations: u64,
    pub final_cost: Option<f64>,
    pub train_accuracy: Option<f64>,
    pub test_accuracy: Option<f64>,
    pub kept_weights: usize,
    pub total_weights: usize,
    pub prune_after_epoch: Option<usize>,
    pub pre_prune_cost: Option<f64>,
    pub post_prune_cost: Option<f64>,
    pub error: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let rows = vec![
            EpochRecord {
                epoch: 1,
                best_cost: 0.1 + 0.2,
                evaluations_so_far: 16,
                kept_weights: 50816,
                wall_ms: 4.25,
            },
            EpochRecord {
                epoch: 2,
                best_cost: 1.234_567_890_123_456_7e-7,
                evaluations_so_far: 24,
                kept_weights: 25408,
                wall_ms: 8.5,
            },
        ];
        write_metrics(&p, &rows).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with(METRICS_HEADER));
        assert!(text.contains("0.30000000000000004"));
        let back = read_metrics(&p).unwrap();
        assert_eq!(back, rows);
        assert_eq!(back[1].best_cost.to_bits(), rows[1].best_cost.to_bits());
    }

    #[test]
    fn empty_metrics_keep_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        write_metrics(&p, &[]).unwrap();
        assert_eq!(read_metrics(&p).unwrap(), vec![]);
    }

    #[test]
    fn wrong_header_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        std::fs::write(&p, "a,b\n1,2\n").unwrap();
        assert!(matches!(read_metrics(&p), Err(Error::Format { .. })));
    }

    #[test]
    fn summary_optional_fields() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let row = SeedSummary {
            seed_index: 0,
            seed: 9,
            status: SeedStatus::Failed,
            epochs: 3,
            evaluations: 10,
            final_cost: None,
            train_accuracy: None,
            test_accuracy: Some(0.5),
            kept_weights: 4,
            total_weights: 8,
            prune_after_epoch: None,
            pre_prune_cost: None,
            post_prune_cost: None,
            error: Some("numeric error: cost is NaN, \"bad\"".into()),
        };
        write_csv(&p, std::slice::from_ref(&row)).unwrap();
        assert_eq!(read_csv::<SeedSummary>(&p).unwrap(), vec![row]);
    }
}
