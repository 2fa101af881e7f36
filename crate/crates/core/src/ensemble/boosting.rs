use crate::data::{Dataset, Label};
use crate::ensemble::bagging::tree_rng;
use crate::ensemble::model::sigmoid;
use crate::ensemble::tree::{grow, NewtonCriterion, TrainMatrix};
use crate::ensemble::{EnsembleConfig, EnsembleModel, Method, TreeParams};
use crate::{Error, Result};

const MAX_HALVINGS: usize = 60;

/// Binomial deviance of a log-odds score: `log(1 + e^f) - y f`.
#[inline]
pub fn log_loss(score: f64, is_anomaly: bool) -> f64 {
    let softplus = score.max(0.0) + (-score.abs()).exp().ln_1p();
    if is_anomaly {
        softplus - score
    } else {
        softplus
    }
}

/// Stagewise log-odds boosting with binomial deviance.
///
/// Each stage fits a depth-limited regression tree to the residuals
/// `y - p` by variance reduction, then sets every leaf to one Newton step
/// `sum(y - p) / sum(p (1 - p))`. The stage enters the model scaled by the
/// learning rate. If the shrunken Newton step would raise a leaf's deviance
/// it is halved until it does not, so the training deviance never increases.
pub fn fit_gradient_boosting(data: &Dataset, config: &EnsembleConfig) -> Result<EnsembleModel> {
    fit_gradient_boosting_traced(data, config).map(|(m, _)| m)
}

/// Like [`fit_gradient_boosting`], also returning the mean training deviance
/// before the first stage and after every stage.
pub fn fit_gradient_boosting_traced(
    data: &Dataset,
    config: &EnsembleConfig,
) -> Result<(EnsembleModel, Vec<f64>)> {
    if config.method != Method::GradientBoosting {
        return Err(Error::config(format!(
            "fit_gradient_boosting called with {}",
            config.method
        )));
    }
    config.validate()?;
    fit_gradient_boosting_unchecked(data, config)
}

/// Skips config validation (allows e.g. a zero learning rate).
pub fn fit_gradient_boosting_unchecked(
    data: &Dataset,
    config: &EnsembleConfig,
) -> Result<(EnsembleModel, Vec<f64>)> {
    if data.is_empty() {
        return Err(Error::invalid("cannot fit on an empty dataset"));
    }
    let [normals, anomalies] = data.class_counts();
    if normals == 0 || anomalies == 0 {
        let label = if anomalies == 0 { Label::Normal } else { Label::Anomaly };
        return Ok((
            EnsembleModel::constant(config.clone(), data.n_features(), label),
            vec![0.0],
        ));
    }

    let n = data.n_rows();
    let y: Vec<bool> = data.labels().iter().map(|l| *l == Label::Anomaly).collect();
    let prior = anomalies as f64 / n as f64;
    let base_score = (prior / (1.0 - prior)).ln();
    let lr = config.learning_rate;
    let params = TreeParams {
        max_depth: config.max_depth,
        min_samples_leaf: config.min_samples_leaf,
        feature_subsample: 1.0,
    };
    let matrix = TrainMatrix::new(data);
    let mut rng = tree_rng(config.seed, 0);

    let mut score = vec![base_score; n];
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let mut trace = vec![mean_loss(&score, &y)];
    let mut trees = Vec::with_capacity(config.n_trees);

    for _ in 0..config.n_trees {
        for i in 0..n {
            let p = sigmoid(score[i]);
            grad[i] = if y[i] { 1.0 - p } else { -p };
            hess[i] = p * (1.0 - p);
        }
        let crit = NewtonCriterion::new(&grad, &hess);
        let grown = grow(&matrix, &crit, &params, &mut rng);
        let mut tree = grown.tree;
        let leaf_of = grown.leaf_of;

        // Per-leaf backtracking. Leaves partition the rows, so a leaf-wise
        // non-increase is a total non-increase.
        let n_nodes = tree.node_count();
        let mut before = vec![0.0f64; n_nodes];
        for i in 0..n {
            before[leaf_of[i] as usize] += log_loss(score[i], y[i]);
        }
        let mut settled: Vec<bool> = tree.nodes().iter().map(|nd| !nd.is_leaf()).collect();
        for _ in 0..MAX_HALVINGS {
            let mut after = vec![0.0f64; n_nodes];
            for i in 0..n {
                let leaf = leaf_of[i] as usize;
                if !settled[leaf] {
                    let step = lr * tree.nodes()[leaf].leaf_value[0];
                    after[leaf] += log_loss(score[i] + step, y[i]);
                }
            }
            let mut pending = false;
            for leaf in 0..n_nodes {
                if settled[leaf] {
                    continue;
                }
                if after[leaf] <= before[leaf] {
                    settled[leaf] = true;
                } else {
                    tree.leaf_value_mut(leaf)[0] *= 0.5;
                    pending = true;
                }
            }
            if !pending {
                break;
            }
        }
        for (leaf, done) in settled.iter().enumerate() {
            if !done {
                tree.leaf_value_mut(leaf)[0] = 0.0;
            }
        }

        for i in 0..n {
            score[i] += lr * tree.nodes()[leaf_of[i] as usize].leaf_value[0];
        }
        trace.push(mean_loss(&score, &y));
        trees.push(tree);
    }
    let weights = vec![lr; trees.len()];
    Ok((
        EnsembleModel::from_parts(config.clone(), data.n_features(), trees, weights, base_score),
        trace,
    ))
}

fn mean_loss(score: &[f64], y: &[bool]) -> f64 {
    score.iter().zip(y).map(|(s, y)| log_loss(*s, *y)).sum::<f64>() / score.len() as f64
}
