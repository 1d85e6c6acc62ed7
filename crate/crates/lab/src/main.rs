use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use warpflow::experiment::{read_json, replot, resolve_out_dir, run_experiment, Outcome};
use warpflow::{ExperimentConfig, ExperimentKind, LabError, Result};

/// Ricci flow laboratory for doubly warped product 4-metrics.
#[derive(Parser)]
#[command(name = "warpflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flow experiments.
    Flow {
        #[command(subcommand)]
        action: FlowAction,
    },
    /// Moser inequality suites.
    Moser {
        #[command(subcommand)]
        action: MoserAction,
    },
    /// Sobolev constant of a tube.
    Sobolev {
        #[command(subcommand)]
        action: SobolevAction,
    },
    /// Curvature concentration scans and hypothesis checks.
    Scan {
        #[command(subcommand)]
        action: ScanAction,
    },
    /// Run a calibration suite and write a regression baseline.
    Calibrate {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compare against this baseline (overrides the config's).
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Run any config, dispatching on its `kind`.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize a finished run and regenerate its plots from the CSVs.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum FlowAction {
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MoserAction {
    Verify {
        /// Samples of the integration-by-parts suite.
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[arg(long)]
        seed: u64,
        /// Heat problems of the energy and recursion suites.
        #[arg(long, default_value_t = 10)]
        heat_problems: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SobolevAction {
    Estimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ScanAction {
    Concentration {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_kind(path: &Path, kind: ExperimentKind) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if cfg.kind != kind {
        // the subcommand fixes the kind
        if cfg.kind == ExperimentKind::Flow || kind != ExperimentKind::Calibrate {
            return Err(LabError::config(
                "kind",
                format!(
                    "expected `{}`, found `{}`",
                    kind.as_str(),
                    cfg.kind.as_str()
                ),
            ));
        }
        cfg.kind = kind;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn execute(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Outcome> {
    let dir = resolve_out_dir(cfg, out);
    run_experiment(cfg, &dir)
}

fn report(dir: &Path) -> Result<u8> {
    let manifest = read_json(&dir.join("manifest.json"))?;
    let summary = read_json(&dir.join("summary.json"))?;
    let plots = replot(dir)?;
    let out = serde_json::json!({
        "dir": dir,
        "kind": manifest["kind"],
        "fingerprint": manifest["fingerprint"],
        "status": summary["status"],
        "results": summary["results"],
        "plots": plots,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(match summary["status"].as_str() {
        Some("passed") => 0,
        Some("stopped") => 3,
        _ => 1,
    })
}

fn dispatch(cli: Cli) -> Result<u8> {
    let outcome = match cli.command {
        Command::Flow {
            action: FlowAction::Run { config, out },
        } => execute(&load_kind(&config, ExperimentKind::Flow)?, out.as_deref())?,
        Command::Moser {
            action:
                MoserAction::Verify {
                    seeds,
                    seed,
                    heat_problems,
                    out,
                },
        } => {
            let mut cfg = ExperimentConfig::new(ExperimentKind::MoserVerify);
            cfg.seed = Some(seed);
            cfg.moser.samples = seeds;
            cfg.moser.heat_problems = heat_problems;
            execute(&cfg.resolved(), out.as_deref())?
        }
        Command::Sobolev {
            action: SobolevAction::Estimate { config, out },
        } => execute(
            &load_kind(&config, ExperimentKind::Sobolev)?,
            out.as_deref(),
        )?,
        Command::Scan {
            action: ScanAction::Concentration { config, out },
        } => execute(&load_kind(&config, ExperimentKind::Scan)?, out.as_deref())?,
        Command::Calibrate {
            suite,
            out,
            baseline,
        } => {
            let mut cfg = load_kind(&suite, ExperimentKind::Calibrate)?;
            if baseline.is_some() {
                cfg.baseline = baseline;
            }
            execute(&cfg, out.as_deref())?
        }
        Command::Run { config, out } => execute(&ExperimentConfig::load(&config)?, out.as_deref())?,
        Command::Report { input } => return report(&input),
    };
    println!(
        "{}",
        serde_json::to_string(&serde_json::json!({
            "out_dir": outcome.out_dir,
            "status": outcome.status,
        }))?
    );
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = LabError::config("<arguments>", e.to_string().trim().to_string());
            eprintln!("{}", err.record());
            return ExitCode::from(err.exit_code());
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code())
        }
    }
}
