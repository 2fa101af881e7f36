//! Experiment runner behind the `cascade-forest` binary.
//!
//! Exit codes: 0 success, 2 configuration, 3 data, 4 training or evaluation.

mod config;
mod registry;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::cascade::{CascadeModel, RoutingStats};
use crate::data::{Dataset, Manifest};
use crate::ensemble::EnsembleModel;
use crate::eval::{
    cascade_threshold_sweep, evaluate_baseline_cv, evaluate_cascade_cv, sweep_cct_cv,
    write_csv_rows, BenchComparison, EvalReport,
};
use crate::{Error, Result};

pub use config::{parse_subsample, ExperimentConfig};
pub use registry::{PrepareOutcome, Registry, RegistryEntry, REGISTRY_FILE};

#[derive(Debug, Parser)]
#[command(
    name = "cascade-forest",
    version,
    about = "Tree ensembles and confidence-gated cascades for binary anomaly detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify raw dataset files and cache canonical CSVs
    Prepare(PrepareArgs),
    /// Train a baseline ensemble or a cascade and write the model
    Train(ExperimentConfig),
    /// Cross-validate a baseline or a cascade
    Eval(ExperimentConfig),
    /// Threshold sweep of a baseline (--baseline) or a cascade (--cascade)
    Sweep(ExperimentConfig),
    /// Cross-validate a baseline and a cascade side by side
    Bench(ExperimentConfig),
}

#[derive(Debug, Clone, Args)]
pub struct PrepareArgs {
    /// TOML manifest listing the raw files
    #[arg(long)]
    pub manifest: PathBuf,
    /// Where canonical CSVs and registry.json go (falls back to CF_DATA_DIR, then ./data)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Data(_)
        | Error::Cell { .. }
        | Error::Checksum { .. }
        | Error::Format(_)
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_) => 3,
        Error::InvalidInput(_) => 4,
    }
}

/// Parses `std::env::args`, runs, and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Prepare(args) => prepare(&args),
        Command::Train(cfg) => with_threads(cfg, train),
        Command::Eval(cfg) => with_threads(cfg, eval),
        Command::Sweep(cfg) => with_threads(cfg, sweep),
        Command::Bench(cfg) => with_threads(cfg, bench),
    }
}

fn with_threads(cfg: ExperimentConfig, f: fn(&ExperimentConfig) -> Result<()>) -> Result<()> {
    let cfg = cfg.resolve()?;
    match cfg.threads()? {
        Some(0) => Err(Error::config("thread count must be positive")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(e.to_string()))?
            .install(|| f(&cfg)),
        None => f(&cfg),
    }
}

fn prepare(args: &PrepareArgs) -> Result<()> {
    if !args.manifest.exists() {
        return Err(Error::config(format!(
            "manifest {} not found",
            args.manifest.display()
        )));
    }
    let manifest = Manifest::load(&args.manifest)?;
    let dir = args.out.clone().unwrap_or_else(|| {
        ExperimentConfig::default().data_dir()
    });
    Registry::prepare(&manifest, &dir, |name, e, outcome| {
        let tag = match outcome {
            PrepareOutcome::Cached => "cached",
            PrepareOutcome::Built => "built",
        };
        println!(
            "{name:<8} {tag:<6} rows {:>9}  anomalies {:>7}  rate {:.3}%  normal/anomaly {}",
            e.rows,
            e.anomalies,
            e.anomaly_rate * 100.0,
            e.normal_anomaly_ratio.map_or("-".into(), |r| format!("{r:.1}")),
        );
    })?;
    println!("registry: {}", dir.join(REGISTRY_FILE).display());
    Ok(())
}

enum Target {
    Baseline(crate::ensemble::EnsembleConfig),
    Cascade(crate::cascade::CascadeConfig),
}

fn single_target(cfg: &ExperimentConfig) -> Result<Target> {
    match (cfg.baseline_config()?, cfg.cascade_config()?) {
        (Some(b), None) => Ok(Target::Baseline(b)),
        (None, Some(c)) => Ok(Target::Cascade(c)),
        (Some(_), Some(_)) => Err(Error::config("give either --baseline or --cascade, not both")),
        (None, None) => Err(Error::config("give --baseline or --cascade")),
    }
}

fn out_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let dir = cfg.out_dir();
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn load(cfg: &ExperimentConfig) -> Result<Dataset> {
    let data = cfg.load_dataset()?;
    let [n, a] = data.class_counts();
    eprintln!("dataset {}: {} rows ({n} normal, {a} anomaly)", data.source(), data.n_rows());
    Ok(data)
}

#[derive(Serialize)]
struct TrainReport {
    model: String,
    dataset: String,
    n_rows: usize,
    seed: u64,
    train_seconds: f64,
    node_count: usize,
    serialized_bytes: usize,
    model_file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    routing: Option<RoutingStats>,
}

fn train(cfg: &ExperimentConfig) -> Result<()> {
    let target = single_target(cfg)?;
    let data = load(cfg)?;
    let dir = out_dir(cfg)?;
    let start = Instant::now();
    let report = match target {
        Target::Baseline(c) => {
            let model = EnsembleModel::fit(&data, &c)?;
            let secs = start.elapsed().as_secs_f64();
            let bytes = model.to_bytes();
            std::fs::write(dir.join("model.cfem"), &bytes)?;
            std::fs::write(dir.join("model.json"), model.to_json()?)?;
            TrainReport {
                model: c.to_string(),
                dataset: data.source().to_string(),
                n_rows: data.n_rows(),
                seed: c.seed,
                train_seconds: secs,
                node_count: model.node_count(),
                serialized_bytes: bytes.len(),
                model_file: "model.cfem".into(),
                routing: None,
            }
        }
        Target::Cascade(c) => {
            let model = CascadeModel::train(&data, &c)?;
            let secs = start.elapsed().as_secs_f64();
            let bytes = model.to_bytes();
            std::fs::write(dir.join("cascade.cfcs"), &bytes)?;
            std::fs::write(dir.join("cascade.json"), model.to_json()?)?;
            TrainReport {
                model: c.to_string(),
                dataset: data.source().to_string(),
                n_rows: data.n_rows(),
                seed: c.coarse.seed,
                train_seconds: secs,
                node_count: model.node_count(),
                serialized_bytes: bytes.len(),
                model_file: "cascade.cfcs".into(),
                routing: Some(model.training_stats().clone()),
            }
        }
    };
    write_json(&dir.join("train_report.json"), &report)?;
    println!(
        "{}: {} nodes, {} bytes, {:.3} s -> {}",
        report.model,
        report.node_count,
        report.serialized_bytes,
        report.train_seconds,
        dir.join(&report.model_file).display()
    );
    if let Some(r) = &report.routing {
        println!(
            "expert training share {:.2}% / {:.2}%, duplicated anomalies {}",
            r.fg1_train_fraction * 100.0,
            r.fg2_train_fraction * 100.0,
            r.duplicated_anomaly_count
        );
    }
    Ok(())
}

fn evaluate(cfg: &ExperimentConfig, data: &Dataset, target: &Target) -> Result<EvalReport> {
    let opts = cfg.eval_options()?;
    match target {
        Target::Baseline(c) => evaluate_baseline_cv(data, c, &opts),
        Target::Cascade(c) => evaluate_cascade_cv(data, c, &opts),
    }
}

fn eval(cfg: &ExperimentConfig) -> Result<()> {
    let target = single_target(cfg)?;
    let data = load(cfg)?;
    let dir = out_dir(cfg)?;
    let report = evaluate(cfg, &data, &target)?;
    let table = EvalReport::table(std::slice::from_ref(&report));
    write_json(&dir.join("eval_report.json"), &report)?;
    std::fs::write(dir.join("eval_report.txt"), &table)?;
    print!("{table}");
    Ok(())
}

fn sweep(cfg: &ExperimentConfig) -> Result<()> {
    let thresholds = cfg.sweep_thresholds()?;
    let opts = cfg.eval_options()?;
    let dir = out_dir(cfg)?;
    let path = dir.join("sweep.csv");
    match (cfg.baseline_config()?, cfg.cascade_template()?) {
        (Some(b), None) => {
            let data = load(cfg)?;
            let rows = sweep_cct_cv(&data, &b, &thresholds, &opts)?;
            write_csv_rows(&rows, std::fs::File::create(&path)?)?;
            write_csv_rows(&rows, std::io::stdout().lock())?;
        }
        (None, Some((coarse, expert))) => {
            let data = load(cfg)?;
            let rows = cascade_threshold_sweep(&data, &coarse, &expert, &thresholds, &opts)?;
            write_csv_rows(&rows, std::fs::File::create(&path)?)?;
            write_csv_rows(&rows, std::io::stdout().lock())?;
        }
        (Some(_), Some(_)) => {
            return Err(Error::config("give either --baseline or --cascade, not both"))
        }
        (None, None) => return Err(Error::config("give --baseline or --cascade")),
    }
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn bench(cfg: &ExperimentConfig) -> Result<()> {
    let (Some(b), Some(c)) = (cfg.baseline_config()?, cfg.cascade_config()?) else {
        return Err(Error::config("bench needs both --baseline and --cascade"));
    };
    let data = load(cfg)?;
    let dir = out_dir(cfg)?;
    let base = evaluate(cfg, &data, &Target::Baseline(b))?;
    let casc = evaluate(cfg, &data, &Target::Cascade(c))?;
    let cmp = BenchComparison::new(base, casc);
    write_json(&dir.join("bench.json"), &cmp)?;
    let table = cmp.table();
    std::fs::write(dir.join("bench.txt"), &table)?;
    print!("{table}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_class() {
        assert_eq!(exit_code(&Error::config("x")), 2);
        assert_eq!(exit_code(&Error::data("x")), 3);
        assert_eq!(exit_code(&Error::invalid("x")), 4);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn train_twice_gives_identical_model_files() {
        let dir = tempfile::tempdir().unwrap();
        let run_once = |sub: &str| {
            let out = dir.path().join(sub);
            let cli = Cli::parse_from([
                "cascade-forest",
                "train",
                "--dataset",
                "synthetic:400,4,0.1,1.5",
                "--cascade",
                "R(C(3,3),C(5,5),0.9,0.95)",
                "--seed",
                "7",
                "--out",
                out.to_str().unwrap(),
            ]);
            run(cli).unwrap();
            std::fs::read(out.join("cascade.cfcs")).unwrap()
        };
        assert_eq!(run_once("a"), run_once("b"));
    }

    #[test]
    fn inverted_thresholds_are_config_errors() {
        let cli = Cli::parse_from([
            "cascade-forest",
            "train",
            "--dataset",
            "synthetic:100,2,0.1,1.0",
            "--cascade",
            "R(C(10,10),C(20,20),0.995,0.98)",
            "--seed",
            "1",
        ]);
        assert_eq!(exit_code(&run(cli).unwrap_err()), 2);
    }
}
