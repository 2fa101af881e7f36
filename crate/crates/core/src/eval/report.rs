use std::fmt::{self, Write as _};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::cascade::{CascadeConfig, CascadeModel, Path};
use crate::data::Dataset;
use crate::ensemble::{EnsembleConfig, EnsembleModel};
use crate::eval::{
    mean_var, measure_latency, stratified_kfold, ClassF1, ConfusionMatrix, LatencyOptions,
    LatencyStats, LatencySubject,
};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub folds: usize,
    pub seed: u64,
    pub latency: LatencyOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            folds: 5,
            seed: 0,
            latency: LatencyOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Baseline,
    Cascade,
}

/// Measurements on one held-out fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_test: usize,
    pub f1: ClassF1,
    pub node_count: usize,
    pub serialized_bytes: usize,
    pub train_seconds: f64,
    pub latency: LatencyStats,
    /// Expert training rows over training rows.
    pub fg_train_fractions: [f64; 2],
    /// Test rows answered by each expert.
    pub fg_test_fractions: [f64; 2],
    /// Test rows per path: short, expert 1, expert 2.
    pub path_counts: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineInfo {
    pub os: String,
    pub arch: String,
    pub logical_cpus: usize,
    pub worker_threads: usize,
    pub cpu_model: Option<String>,
}

impl MachineInfo {
    pub fn detect() -> Self {
        let cpu_model = std::fs::read_to_string("/proc/cpuinfo").ok().and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split_once(':'))
                .map(|(_, v)| v.trim().to_string())
        });
        MachineInfo {
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            logical_cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
            worker_threads: rayon::current_num_threads(),
            cpu_model,
        }
    }
}

/// Cross-validated measurements of one model setting: means over folds,
/// sample variances of the F1 scores, and the per-fold detail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub kind: ModelKind,
    pub f1_normal: f64,
    pub f1_anomaly: f64,
    pub f1_normal_var: f64,
    pub f1_anomaly_var: f64,
    pub node_count: f64,
    pub serialized_bytes: f64,
    pub train_seconds: f64,
    pub mean_latency_us: f64,
    pub p99_latency_us: f64,
    pub worst_case_latency_us: f64,
    pub fg_train_fractions: [f64; 2],
    pub fg_test_fractions: [f64; 2],
    pub folds: usize,
    pub seed: u64,
    pub provenance: String,
    pub n_rows: usize,
    pub machine: MachineInfo,
    pub generated_unix: u64,
    pub per_fold: Vec<FoldReport>,
}

impl EvalReport {
    pub(crate) fn aggregate(
        model: String,
        kind: ModelKind,
        data: &Dataset,
        opts: &EvalOptions,
        per_fold: Vec<FoldReport>,
    ) -> Self {
        let col = |f: &dyn Fn(&FoldReport) -> f64| -> (f64, f64) {
            mean_var(&per_fold.iter().map(f).collect::<Vec<_>>())
        };
        let (f1_normal, f1_normal_var) = col(&|r| r.f1.normal);
        let (f1_anomaly, f1_anomaly_var) = col(&|r| r.f1.anomaly);
        EvalReport {
            model,
            kind,
            f1_normal,
            f1_anomaly,
            f1_normal_var,
            f1_anomaly_var,
            node_count: col(&|r| r.node_count as f64).0,
            serialized_bytes: col(&|r| r.serialized_bytes as f64).0,
            train_seconds: col(&|r| r.train_seconds).0,
            mean_latency_us: col(&|r| r.latency.mean_us).0,
            p99_latency_us: col(&|r| r.latency.p99_us).0,
            worst_case_latency_us: col(&|r| r.latency.worst_case_us).0,
            fg_train_fractions: [
                col(&|r| r.fg_train_fractions[0]).0,
                col(&|r| r.fg_train_fractions[1]).0,
            ],
            fg_test_fractions: [
                col(&|r| r.fg_test_fractions[0]).0,
                col(&|r| r.fg_test_fractions[1]).0,
            ],
            folds: per_fold.len(),
            seed: opts.seed,
            provenance: data.source().to_string(),
            n_rows: data.n_rows(),
            machine: MachineInfo::detect(),
            generated_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            per_fold,
        }
    }

    /// Copy with wall-clock fields zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.train_seconds = 0.0;
        r.mean_latency_us = 0.0;
        r.p99_latency_us = 0.0;
        r.worst_case_latency_us = 0.0;
        r.generated_unix = 0;
        for f in &mut r.per_fold {
            f.train_seconds = 0.0;
            f.latency = LatencyStats {
                timed_calls: f.latency.timed_calls,
                ..LatencyStats::default()
            };
        }
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn f1(&self) -> ClassF1 {
        ClassF1 {
            normal: self.f1_normal,
            anomaly: self.f1_anomaly,
        }
    }

    /// Aligned text table of several reports.
    pub fn table(reports: &[EvalReport]) -> String {
        let header = [
            "model",
            "normal F1",
            "anomaly F1",
            "nodes",
            "bytes",
            "train s",
            "mean us",
            "worst us",
            "fg train %",
            "fg test %",
        ];
        let rows: Vec<Vec<String>> = reports
            .iter()
            .map(|r| {
                let pct = |p: [f64; 2]| format!("{:.2}, {:.2}", p[0] * 100.0, p[1] * 100.0);
                vec![
                    r.model.clone(),
                    format!("{:.6}", r.f1_normal),
                    format!("{:.6}", r.f1_anomaly),
                    format!("{:.0}", r.node_count),
                    format!("{:.0}", r.serialized_bytes),
                    format!("{:.3}", r.train_seconds),
                    format!("{:.2}", r.mean_latency_us),
                    format!("{:.2}", r.worst_case_latency_us),
                    pct(r.fg_train_fractions),
                    pct(r.fg_test_fractions),
                ]
            })
            .collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let line = |cells: Vec<&str>, out: &mut String| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(header.to_vec(), &mut out);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(rule.iter().map(String::as_str).collect(), &mut out);
        for row in &rows {
            line(row.iter().map(String::as_str).collect(), &mut out);
        }
        out
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&EvalReport::table(std::slice::from_ref(self)))
    }
}

/// Measurements of a trained cascade on one test split.
pub(crate) fn cascade_fold_metrics(
    fold: usize,
    model: &CascadeModel,
    test: &Dataset,
    train_seconds: f64,
    latency: &LatencyOptions,
) -> Result<FoldReport> {
    let mut cm = ConfusionMatrix::default();
    let mut paths = [0usize; 3];
    for i in 0..test.n_rows() {
        let r = model.classify(test.row(i))?;
        cm.add(test.label(i), r.label);
        paths[r.path.index()] += 1;
    }
    let n = test.n_rows().max(1) as f64;
    let stats = model.training_stats();
    Ok(FoldReport {
        fold,
        n_test: test.n_rows(),
        f1: cm.f1(),
        node_count: model.node_count(),
        serialized_bytes: model.to_bytes().len(),
        train_seconds,
        latency: measure_latency(LatencySubject::Cascade(model), test, latency)?,
        fg_train_fractions: [stats.fg1_train_fraction, stats.fg2_train_fraction],
        fg_test_fractions: [
            paths[Path::Expert1.index()] as f64 / n,
            paths[Path::Expert2.index()] as f64 / n,
        ],
        path_counts: paths,
    })
}

pub(crate) fn baseline_fold(
    fold: usize,
    train: &Dataset,
    test: &Dataset,
    config: &EnsembleConfig,
    latency: &LatencyOptions,
) -> Result<FoldReport> {
    let start = Instant::now();
    let model = EnsembleModel::fit(train, config)?;
    let train_seconds = start.elapsed().as_secs_f64();
    let mut cm = ConfusionMatrix::default();
    for i in 0..test.n_rows() {
        cm.add(test.label(i), model.predict_unchecked(test.row(i)).argmax());
    }
    let size = model.size();
    Ok(FoldReport {
        fold,
        n_test: test.n_rows(),
        f1: cm.f1(),
        node_count: size.node_count,
        serialized_bytes: size.serialized_bytes,
        train_seconds,
        latency: measure_latency(LatencySubject::Ensemble(&model), test, latency)?,
        fg_train_fractions: [0.0; 2],
        fg_test_fractions: [0.0; 2],
        path_counts: [test.n_rows(), 0, 0],
    })
}

/// Stratified k-fold evaluation of a cascade. F1 is computed over every test
/// row; each fold's cascade is trained from scratch and timed.
pub fn evaluate_cascade_cv(
    data: &Dataset,
    config: &CascadeConfig,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    config.check()?;
    let folds = stratified_kfold(data, opts.folds, opts.seed)?;
    let mut reports = Vec::with_capacity(folds.len());
    for (k, fold) in folds.iter().enumerate() {
        let train = data.select(&fold.train);
        let test = data.select(&fold.test);
        let start = Instant::now();
        let model = CascadeModel::train(&train, config)?;
        let secs = start.elapsed().as_secs_f64();
        reports.push(cascade_fold_metrics(k, &model, &test, secs, &opts.latency)?);
    }
    Ok(EvalReport::aggregate(
        config.to_string(),
        ModelKind::Cascade,
        data,
        opts,
        reports,
    ))
}

/// Stratified k-fold evaluation of a single ensemble.
pub fn evaluate_baseline_cv(
    data: &Dataset,
    config: &EnsembleConfig,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    config.validate()?;
    let folds = stratified_kfold(data, opts.folds, opts.seed)?;
    let mut reports = Vec::with_capacity(folds.len());
    for (k, fold) in folds.iter().enumerate() {
        let train = data.select(&fold.train);
        let test = data.select(&fold.test);
        reports.push(baseline_fold(k, &train, &test, config, &opts.latency)?);
    }
    Ok(EvalReport::aggregate(
        config.to_string(),
        ModelKind::Baseline,
        data,
        opts,
        reports,
    ))
}
