use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use grwc_core::experiment::{evaluate_files, run_experiment, write_comparison, ExperimentConfig};

/// Train and compare GRWC, RWC and pruned GRWC networks.
#[derive(Parser, Debug)]
#[command(name = "grwc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config key, e.g. `--set grwc.generations=5`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Overlay the median curves of finished runs.
    Compare {
        #[arg(required = true, num_args = 1..)]
        run_dirs: Vec<PathBuf>,
        /// SVG output path; the table is written next to it as .txt.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a saved model on IDX images and labels.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
}

/// Usage problems exit with 1, everything else with 2.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<grwc_core::Error>() {
        Some(e) if e.is_usage() => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, overrides } => {
            let cfg = ExperimentConfig::load(&config, &overrides)?;
            let report = run_experiment(&cfg).with_context(|| format!("running {}", config.display()))?;
            for s in &report.seeds {
                match (&s.final_cost, &s.error) {
                    (Some(c), _) => println!(
                        "seed {:>3} ({}): final cost {c:.6}, kept {}/{}{}",
                        s.seed_index,
                        s.seed,
                        s.kept_weights,
                        s.total_weights,
                        s.test_accuracy
                            .map(|a| format!(", test accuracy {a:.4}"))
                            .unwrap_or_default()
                    ),
                    (None, e) => eprintln!(
                        "seed {:>3} ({}): failed after {} epochs: {}",
                        s.seed_index,
                        s.seed,
                        s.epochs,
                        e.as_deref().unwrap_or("unknown error")
                    ),
                }
            }
            println!("wrote {}", report.dir.display());
            let ok = report.failed().next().is_none();
            Ok(ok)
        }
        Command::Compare { run_dirs, out } => {
            let c = write_comparison(&run_dirs, &out)?;
            print!("{}", c.table);
            println!("wrote {}", out.display());
            Ok(true)
        }
        Command::Eval { model, images, labels } => {
            let (accuracy, n) = evaluate_files(&model, &images, &labels)?;
            println!("accuracy {accuracy:.6} on {n} samples");
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
