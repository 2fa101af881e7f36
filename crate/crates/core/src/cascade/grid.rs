use std::time::Instant;

use crate::cascade::{score_rows, threshold_lattice, CascadeConfig, CascadeModel};
use crate::data::Dataset;
use crate::ensemble::{EnsembleConfig, EnsembleModel};
use crate::eval::{cascade_fold_metrics, stratified_kfold, EvalOptions, EvalReport, ModelKind};
use crate::{Error, Result};

/// Threshold pairs to try.
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdGrid {
    /// Every `cct <= tct` on the lattice `0.5, 0.5 + step, ..., 1`.
    Lattice(f64),
    /// Explicit `(cct, tct)` pairs.
    Pairs(Vec<(f64, f64)>),
}

impl ThresholdGrid {
    /// Pairs ordered by `tct`, then `cct`.
    pub fn pairs(&self) -> Result<Vec<(f64, f64)>> {
        let mut pairs = match self {
            ThresholdGrid::Lattice(step) => {
                let l = threshold_lattice(*step)?;
                let mut p = Vec::new();
                for &tct in &l {
                    for &cct in l.iter().take_while(|c| **c <= tct) {
                        p.push((cct, tct));
                    }
                }
                p
            }
            ThresholdGrid::Pairs(p) => p.clone(),
        };
        pairs.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
        pairs.dedup();
        Ok(pairs)
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub config: CascadeConfig,
    pub report: EvalReport,
}

/// Cross-validates every (coarse, expert, cct, tct) combination and ranks
/// by anomaly F1, best first, then by mean latency.
///
/// Within a fold the coarse model is trained once per coarse candidate and
/// the experts once per `tct`; `cct` only moves the classification gate.
/// Reported training time still covers the coarse model plus the experts.
pub fn grid_search(
    data: &Dataset,
    coarse_candidates: &[EnsembleConfig],
    expert_candidates: &[EnsembleConfig],
    grid: &ThresholdGrid,
    opts: &EvalOptions,
) -> Result<Vec<GridEntry>> {
    if coarse_candidates.is_empty() || expert_candidates.is_empty() {
        return Err(Error::config("grid search needs coarse and expert candidates"));
    }
    let pairs = grid.pairs()?;
    if pairs.is_empty() {
        return Err(Error::config("grid search needs at least one threshold pair"));
    }
    let mut configs = Vec::new();
    for c in coarse_candidates {
        for e in expert_candidates {
            for &(cct, tct) in &pairs {
                configs.push(CascadeConfig::new(c.clone(), e.clone(), cct, tct)?);
            }
        }
    }
    let folds = stratified_kfold(data, opts.folds, opts.seed)?;
    let mut per_config: Vec<Vec<_>> = vec![Vec::with_capacity(folds.len()); configs.len()];

    for (k, fold) in folds.iter().enumerate() {
        let train = data.select(&fold.train);
        let test = data.select(&fold.test);
        for (ci, coarse_cfg) in coarse_candidates.iter().enumerate() {
            let start = Instant::now();
            let coarse = EnsembleModel::fit(&train, coarse_cfg)?;
            let scores = score_rows(&coarse, &train)?;
            let coarse_secs = start.elapsed().as_secs_f64();
            for ei in 0..expert_candidates.len() {
                let base = (ci * expert_candidates.len() + ei) * pairs.len();
                let mut p = 0;
                while p < pairs.len() {
                    let tct = pairs[p].1;
                    let start = Instant::now();
                    let (mut model, _) =
                        CascadeModel::from_scores(coarse.clone(), &scores, &train, &configs[base + p])?;
                    let secs = coarse_secs + start.elapsed().as_secs_f64();
                    while p < pairs.len() && pairs[p].1 == tct {
                        model.set_cct(pairs[p].0)?;
                        per_config[base + p].push(cascade_fold_metrics(
                            k,
                            &model,
                            &test,
                            secs,
                            &opts.latency,
                        )?);
                        p += 1;
                    }
                }
            }
        }
    }

    let mut entries: Vec<GridEntry> = configs
        .into_iter()
        .zip(per_config)
        .map(|(config, folds)| GridEntry {
            report: EvalReport::aggregate(config.to_string(), ModelKind::Cascade, data, opts, folds),
            config,
        })
        .collect();
    rank(&mut entries);
    Ok(entries)
}

/// Stable sort: anomaly F1 descending, then mean latency ascending.
pub fn rank(entries: &mut [GridEntry]) {
    entries.sort_by(|a, b| {
        b.report
            .f1_anomaly
            .total_cmp(&a.report.f1_anomaly)
            .then(a.report.mean_latency_us.total_cmp(&b.report.mean_latency_us))
    });
}
