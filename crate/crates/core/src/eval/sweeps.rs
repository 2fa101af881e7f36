use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{score_rows, sweep_scores, CascadeConfig, CascadeModel, Path, SweepPoint};
use crate::data::Dataset;
use crate::ensemble::{EnsembleConfig, EnsembleModel};
use crate::eval::{mean_var, stratified_kfold, ConfusionMatrix, EvalOptions};
use crate::Result;

/// Fold-averaged coarse-model sweep at one threshold. F1 means run over the
/// folds where the class had valid rows and are `None` if it had none in any.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CctSweepRow {
    pub threshold: f64,
    pub valid_fraction_normal: f64,
    pub valid_fraction_normal_var: f64,
    pub valid_fraction_anomaly: f64,
    pub valid_fraction_anomaly_var: f64,
    pub f1_normal: Option<f64>,
    pub f1_normal_var: Option<f64>,
    pub f1_anomaly: Option<f64>,
    pub f1_anomaly_var: Option<f64>,
}

/// Trains `config` on each training split and sweeps the thresholds on the
/// held-out split.
pub fn sweep_cct_cv(
    data: &Dataset,
    config: &EnsembleConfig,
    thresholds: &[f64],
    opts: &EvalOptions,
) -> Result<Vec<CctSweepRow>> {
    config.validate()?;
    let folds = stratified_kfold(data, opts.folds, opts.seed)?;
    let mut per_fold: Vec<Vec<SweepPoint>> = Vec::with_capacity(folds.len());
    for fold in &folds {
        let train = data.select(&fold.train);
        let test = data.select(&fold.test);
        let model = EnsembleModel::fit(&train, config)?;
        let scores = score_rows(&model, &test)?;
        per_fold.push(sweep_scores(&scores, test.labels(), thresholds)?);
    }
    Ok(thresholds
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let points: Vec<&SweepPoint> = per_fold.iter().map(|f| &f[i]).collect();
            let vf_n = mean_var(&points.iter().map(|p| p.valid_fraction_normal).collect::<Vec<_>>());
            let vf_a = mean_var(&points.iter().map(|p| p.valid_fraction_anomaly).collect::<Vec<_>>());
            let f1_n = present_mean_var(points.iter().map(|p| p.f1_normal));
            let f1_a = present_mean_var(points.iter().map(|p| p.f1_anomaly));
            CctSweepRow {
                threshold: t,
                valid_fraction_normal: vf_n.0,
                valid_fraction_normal_var: vf_n.1,
                valid_fraction_anomaly: vf_a.0,
                valid_fraction_anomaly_var: vf_a.1,
                f1_normal: f1_n.map(|m| m.0),
                f1_normal_var: f1_n.map(|m| m.1),
                f1_anomaly: f1_a.map(|m| m.0),
                f1_anomaly_var: f1_a.map(|m| m.1),
            }
        })
        .collect())
}

fn present_mean_var(values: impl Iterator<Item = Option<f64>>) -> Option<(f64, f64)> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| mean_var(&v))
}

/// Fold-averaged cascade quality with `cct = tct = threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeSweepRow {
    pub threshold: f64,
    pub f1_normal: f64,
    pub f1_anomaly: f64,
    /// Expert training rows (both experts) over training rows.
    pub fg_train_fraction: f64,
    pub fg1_ratio: Option<f64>,
    pub fg2_ratio: Option<f64>,
    /// Test rows answered by an expert.
    pub fg_test_fraction: f64,
}

/// Sweeps a cascade's shared threshold. Each fold trains its coarse model
/// once; only the experts are retrained per threshold.
pub fn cascade_threshold_sweep(
    data: &Dataset,
    coarse: &EnsembleConfig,
    expert: &EnsembleConfig,
    thresholds: &[f64],
    opts: &EvalOptions,
) -> Result<Vec<CascadeSweepRow>> {
    let configs = thresholds
        .iter()
        .map(|&t| CascadeConfig::new(coarse.clone(), expert.clone(), t, t))
        .collect::<Result<Vec<_>>>()?;
    let folds = stratified_kfold(data, opts.folds, opts.seed)?;
    // per_fold[fold][threshold]
    let mut per_fold: Vec<Vec<CascadeSweepRow>> = Vec::with_capacity(folds.len());
    for fold in &folds {
        let train = data.select(&fold.train);
        let test = data.select(&fold.test);
        let coarse_model = EnsembleModel::fit(&train, coarse)?;
        let scores = score_rows(&coarse_model, &train)?;
        let rows = configs
            .par_iter()
            .map(|cfg| -> Result<CascadeSweepRow> {
                let (model, _) =
                    CascadeModel::from_scores(coarse_model.clone(), &scores, &train, cfg)?;
                let mut cm = ConfusionMatrix::default();
                let mut routed = 0usize;
                for i in 0..test.n_rows() {
                    let r = model.classify(test.row(i))?;
                    cm.add(test.label(i), r.label);
                    routed += (r.path != Path::ShortPath) as usize;
                }
                let f1 = cm.f1();
                let stats = model.training_stats();
                Ok(CascadeSweepRow {
                    threshold: cfg.cct(),
                    f1_normal: f1.normal,
                    f1_anomaly: f1.anomaly,
                    fg_train_fraction: stats.expert_train_fraction(),
                    fg1_ratio: stats.fg1_ratio,
                    fg2_ratio: stats.fg2_ratio,
                    fg_test_fraction: routed as f64 / test.n_rows().max(1) as f64,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        per_fold.push(rows);
    }
    Ok((0..thresholds.len())
        .map(|i| {
            let col = |f: &dyn Fn(&CascadeSweepRow) -> f64| {
                mean_var(&per_fold.iter().map(|r| f(&r[i])).collect::<Vec<_>>()).0
            };
            let opt = |f: &dyn Fn(&CascadeSweepRow) -> Option<f64>| {
                present_mean_var(per_fold.iter().map(|r| f(&r[i]))).map(|m| m.0)
            };
            CascadeSweepRow {
                threshold: thresholds[i],
                f1_normal: col(&|r| r.f1_normal),
                f1_anomaly: col(&|r| r.f1_anomaly),
                fg_train_fraction: col(&|r| r.fg_train_fraction),
                fg1_ratio: opt(&|r| r.fg1_ratio),
                fg2_ratio: opt(&|r| r.fg2_ratio),
                fg_test_fraction: col(&|r| r.fg_test_fraction),
            }
        })
        .collect())
}

/// Writes rows as CSV with a header; absent values become empty cells.
pub fn write_csv_rows<T: Serialize, W: Write>(rows: &[T], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
