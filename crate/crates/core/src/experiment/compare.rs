use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use super::record::{read_csv, read_metrics, SeedStatus, SeedSummary};
use super::run::{seed_dir, RunManifest};
use super::svg::{render, Panel, Series};
use crate::error::{Error, Result};

/// Per-epoch best-cost curves of the successful seeds.
pub(crate) fn seed_curves(run_dir: &Path, seeds: &[SeedSummary]) -> Result<Vec<Vec<f64>>> {
    seeds
        .iter()
        .filter(|s| s.status == SeedStatus::Ok)
        .map(|s| {
            let m = read_metrics(&seed_dir(run_dir, s.seed_index).join("metrics.csv"))?;
            Ok(m.iter().map(|r| r.best_cost).collect())
        })
        .collect()
}

/// Median, minimum and maximum across curves at every epoch. A curve that
/// ended early (stop rule) holds its final value.
pub fn median_band(curves: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let len = curves.iter().map(Vec::len).max().unwrap_or(0);
    let mut med = Vec::with_capacity(len);
    let mut lo = Vec::with_capacity(len);
    let mut hi = Vec::with_capacity(len);
    let mut col = Vec::with_capacity(curves.len());
    for e in 0..len {
        col.clear();
        col.extend(curves.iter().filter_map(|c| c.get(e).or(c.last()).copied()));
        col.sort_by(f64::total_cmp);
        med.push(median_sorted(&col));
        lo.push(col[0]);
        hi.push(col[col.len() - 1]);
    }
    (med, lo, hi)
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(median_sorted(&v))
}

#[derive(Clone, Debug)]
pub struct RunCurves {
    pub dir: PathBuf,
    pub label: String,
    pub manifest: RunManifest,
    pub median: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    /// Final cost of each successful seed.
    pub finals: Vec<f64>,
    pub failed_seeds: usize,
}

impl RunCurves {
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest = RunManifest::load(dir)?;
        let seeds: Vec<SeedSummary> = read_csv(&dir.join("summary.csv"))?;
        let curves = seed_curves(dir, &seeds)?;
        let (median, min, max) = median_band(&curves);
        let finals = curves.iter().filter_map(|c| c.last().copied()).collect();
        let name = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(RunCurves {
            dir: dir.to_path_buf(),
            label: format!("{} [{}]", manifest.algorithm.as_str(), name),
            failed_seeds: seeds.iter().filter(|s| s.status == SeedStatus::Failed).count(),
            manifest,
            median,
            min,
            max,
            finals,
        })
    }

    pub fn median_final(&self) -> Option<f64> {
        median(&self.finals)
    }

    fn series(&self, per_evaluation: bool) -> Series {
        let scale = if per_evaluation {
            self.manifest.pop_size as f64
        } else {
            1.0
        };
        let x = |i: usize| (i + 1) as f64 * scale;
        Series {
            label: self.label.clone(),
            line: self.median.iter().enumerate().map(|(i, &y)| (x(i), y)).collect(),
            band: self
                .min
                .iter()
                .zip(&self.max)
                .enumerate()
                .map(|(i, (&l, &h))| (x(i), l, h))
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub runs: Vec<RunCurves>,
    pub table: String,
    pub svg: String,
}

/// Overlays the median curves of several runs of the same task, once against
/// epochs and once against cost evaluations.
pub fn compare_runs(dirs: &[PathBuf]) -> Result<Comparison> {
    if dirs.is_empty() {
        return Err(Error::Usage("compare needs at least one run directory".into()));
    }
    let runs = dirs.iter().map(|d| RunCurves::load(d)).collect::<Result<Vec<_>>>()?;
    let (task, dataset) = (&runs[0].manifest.task, &runs[0].manifest.dataset);
    for r in &runs[1..] {
        if &r.manifest.task != task || &r.manifest.dataset != dataset {
            return Err(Error::Usage(format!(
                "cannot compare {} on {} with {} on {}",
                runs[0].dir.display(),
                dataset,
                r.dir.display(),
                r.manifest.dataset
            )));
        }
    }

    let panel = |per_evaluation: bool| Panel {
        title: format!("median best cost on {dataset}, min/max band"),
        x_label: if per_evaluation { "cost evaluations" } else { "epoch" }.into(),
        y_label: "best cost".into(),
        series: runs.iter().map(|r| r.series(per_evaluation)).collect(),
    };
    let svg = render(&[panel(false), panel(true)]);

    let baseline = runs[0].median_final();
    let mut table = String::new();
    let _ = writeln!(
        table,
        "{:<32} {:>5} {:>6} {:>12} {:>12} {:>12} {:>12}",
        "run", "seeds", "failed", "median_final", "min_final", "max_final", "gap"
    );
    for r in &runs {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6}"));
        let min = r.finals.iter().copied().reduce(f64::min);
        let max = r.finals.iter().copied().reduce(f64::max);
        let gap = r.median_final().zip(baseline).map(|(a, b)| a - b);
        let _ = writeln!(
            table,
            "{:<32} {:>5} {:>6} {:>12} {:>12} {:>12} {:>12}",
            r.label,
            r.finals.len(),
            r.failed_seeds,
            fmt(r.median_final()),
            fmt(min),
            fmt(max),
            fmt(gap)
        );
    }
    Ok(Comparison { runs, table, svg })
}

/// Runs [`compare_runs`] and writes the SVG to `out` and the table next to it
/// with a `.txt` extension.
pub fn write_comparison(dirs: &[PathBuf], out: &Path) -> Result<Comparison> {
    let c = compare_runs(dirs)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(out, &c.svg).map_err(|e| Error::io(out, e))?;
    let txt = out.with_extension("txt");
    fs::write(&txt, &c.table).map_err(|e| Error::io(&txt, e))?;
    Ok(c)
}
