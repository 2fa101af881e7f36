use crate::data::{Dataset, Label};
use crate::ensemble::bagging::tree_rng;
use crate::ensemble::tree::{grow, GiniCriterion, TrainMatrix};
use crate::ensemble::{EnsembleConfig, EnsembleModel, Method, TreeParams};
use crate::{Error, Result};

/// Stage weight given to a stage with zero weighted error.
pub const ADABOOST_MAX_STAGE_WEIGHT: f64 = 11.512_925_464_920_228;

const PERFECT_STAGE_EPS: f64 = 1e-10;

/// Discrete AdaBoost over depth-limited trees.
///
/// Stage weight is `0.5 * ln((1 - e) / e)` for weighted error `e`. A stage
/// with `e = 0` gets [`ADABOOST_MAX_STAGE_WEIGHT`] and ends training; a stage
/// with `e >= 0.5` is discarded and ends training.
pub fn fit_adaboost(data: &Dataset, config: &EnsembleConfig) -> Result<EnsembleModel> {
    fit_adaboost_traced(data, config).map(|(m, _)| m)
}

/// Like [`fit_adaboost`], also returning the weighted error of every accepted
/// stage.
pub fn fit_adaboost_traced(
    data: &Dataset,
    config: &EnsembleConfig,
) -> Result<(EnsembleModel, Vec<f64>)> {
    if config.method != Method::AdaBoost {
        return Err(Error::config(format!("fit_adaboost called with {}", config.method)));
    }
    config.validate()?;
    if data.is_empty() {
        return Err(Error::invalid("cannot fit on an empty dataset"));
    }
    let [normals, anomalies] = data.class_counts();
    if normals == 0 || anomalies == 0 {
        let label = if anomalies == 0 { Label::Normal } else { Label::Anomaly };
        return Ok((
            EnsembleModel::constant(config.clone(), data.n_features(), label),
            Vec::new(),
        ));
    }

    let n = data.n_rows();
    let params = TreeParams {
        max_depth: config.max_depth,
        min_samples_leaf: config.min_samples_leaf,
        feature_subsample: 1.0,
    };
    let matrix = TrainMatrix::new(data);
    let mut rng = tree_rng(config.seed, 0);
    let mut weights = vec![1.0 / n as f64; n];
    let mut trees = Vec::new();
    let mut alphas = Vec::new();
    let mut errors = Vec::new();
    let mut wrong = vec![false; n];

    for _ in 0..config.n_trees {
        let crit = GiniCriterion::new(data.labels(), &weights);
        let grown = grow(&matrix, &crit, &params, &mut rng);
        let tree = grown.tree;
        let mut err = 0.0;
        let mut total = 0.0;
        for i in 0..n {
            let leaf = &tree.nodes()[grown.leaf_of[i] as usize].leaf_value;
            let vote = if leaf[0] > leaf[1] { Label::Normal } else { Label::Anomaly };
            wrong[i] = vote != data.label(i);
            total += weights[i];
            if wrong[i] {
                err += weights[i];
            }
        }
        let eps = err / total;
        if eps >= 0.5 {
            break;
        }
        if eps <= 0.0 {
            trees.push(tree);
            alphas.push(0.5 * ((1.0 - PERFECT_STAGE_EPS) / PERFECT_STAGE_EPS).ln());
            errors.push(eps);
            break;
        }
        let alpha = 0.5 * ((1.0 - eps) / eps).ln();
        let (up, down) = (alpha.exp(), (-alpha).exp());
        let mut sum = 0.0;
        for i in 0..n {
            weights[i] *= if wrong[i] { up } else { down };
            sum += weights[i];
        }
        for w in &mut weights {
            *w /= sum;
        }
        trees.push(tree);
        alphas.push(alpha);
        errors.push(eps);
    }
    Ok((
        EnsembleModel::from_parts(config.clone(), data.n_features(), trees, alphas, 0.0),
        errors,
    ))
}
