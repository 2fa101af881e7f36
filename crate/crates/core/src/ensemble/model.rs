use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label};
use crate::ensemble::{
    fit_adaboost, fit_bagging, fit_gradient_boosting, DistributionVector, EnsembleConfig, Method,
    Predictor, Tree,
};
use crate::{Error, Result};

/// A trained tree ensemble.
///
/// Prediction depends on the method:
///
/// - bagging: mean of the per-tree leaf distributions;
/// - gradient boosting: logistic of `base_score + sum(weight * leaf score)`;
/// - AdaBoost: share of stage weight voting for each class.
///
/// A model trained on single-class data is *degenerate*: it holds no trees and
/// always answers that class with certainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub(crate) config: EnsembleConfig,
    pub(crate) n_features: usize,
    pub(crate) trees: Vec<Tree>,
    pub(crate) tree_weights: Vec<f64>,
    pub(crate) base_score: f64,
    pub(crate) constant: Option<Label>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ModelSize {
    pub node_count: usize,
    pub serialized_bytes: usize,
}

impl EnsembleModel {
    /// Trains with the learner named by `config.method`.
    pub fn fit(data: &Dataset, config: &EnsembleConfig) -> Result<Self> {
        match config.method {
            Method::Bagging => fit_bagging(data, config),
            Method::GradientBoosting => fit_gradient_boosting(data, config),
            Method::AdaBoost => fit_adaboost(data, config),
        }
    }

    /// Degenerate model that always answers `label` with certainty.
    pub fn constant(config: EnsembleConfig, n_features: usize, label: Label) -> Self {
        EnsembleModel {
            config,
            n_features,
            trees: Vec::new(),
            tree_weights: Vec::new(),
            base_score: 0.0,
            constant: Some(label),
        }
    }

    pub(crate) fn from_parts(
        config: EnsembleConfig,
        n_features: usize,
        trees: Vec<Tree>,
        tree_weights: Vec<f64>,
        base_score: f64,
    ) -> Self {
        debug_assert_eq!(trees.len(), tree_weights.len());
        EnsembleModel {
            config,
            n_features,
            trees,
            tree_weights,
            base_score,
            constant: None,
        }
    }

    pub fn config(&self) -> &EnsembleConfig {
        &self.config
    }

    pub fn method(&self) -> Method {
        self.config.method
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn tree_weights(&self) -> &[f64] {
        &self.tree_weights
    }

    pub fn base_score(&self) -> f64 {
        self.base_score
    }

    /// Trees actually kept; below `config.n_trees` after early termination.
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.constant.is_some()
    }

    pub fn constant_label(&self) -> Option<Label> {
        self.constant
    }

    pub fn node_count(&self) -> usize {
        self.trees.iter().map(Tree::node_count).sum()
    }

    pub fn size(&self) -> ModelSize {
        ModelSize {
            node_count: self.node_count(),
            serialized_bytes: self.to_bytes().len(),
        }
    }

    /// Raw additive score for gradient boosting (log-odds of `Anomaly`).
    fn boosted_score(&self, x: &[f64]) -> f64 {
        let mut score = self.base_score;
        for (tree, w) in self.trees.iter().zip(&self.tree_weights) {
            score += w * tree.leaf_value(x)[0];
        }
        score
    }

    #[inline]
    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> DistributionVector {
        if let Some(label) = self.constant {
            return DistributionVector::certain(label);
        }
        match self.config.method {
            Method::Bagging => {
                if self.trees.is_empty() {
                    return DistributionVector::from_anomaly(0.5);
                }
                let sum: f64 = self.trees.iter().map(|t| t.leaf_value(x)[1]).sum();
                DistributionVector::from_anomaly(sum / self.trees.len() as f64)
            }
            Method::GradientBoosting => DistributionVector::from_anomaly(sigmoid(self.boosted_score(x))),
            Method::AdaBoost => {
                let mut votes = [0.0f64; 2];
                for (tree, alpha) in self.trees.iter().zip(&self.tree_weights) {
                    let leaf = tree.leaf_value(x);
                    let vote = if leaf[0] > leaf[1] { Label::Normal } else { Label::Anomaly };
                    votes[vote.index()] += alpha;
                }
                let total = votes[0] + votes[1];
                if total > 0.0 {
                    DistributionVector::from_anomaly(votes[1] / total)
                } else {
                    DistributionVector::from_anomaly(0.5)
                }
            }
        }
    }
}

impl Predictor for EnsembleModel {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: &[f64]) -> Result<DistributionVector> {
        if x.len() != self.n_features {
            return Err(Error::invalid(format!(
                "expected {} features, got {}",
                self.n_features,
                x.len()
            )));
        }
        Ok(self.predict_unchecked(x))
    }
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_of_two_pure_leaves() {
        let model = EnsembleModel::from_parts(
            EnsembleConfig::bagging(2, None),
            1,
            vec![Tree::leaf([1.0, 0.0], 1), Tree::leaf([0.0, 1.0], 1)],
            vec![1.0, 1.0],
            0.0,
        );
        let d = model.predict_proba(&[0.0]).unwrap();
        assert_eq!((d.p_normal, d.p_anomaly), (0.5, 0.5));
        assert!(model.predict_proba(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn stump_and_empty_sizes() {
        let stump = crate::ensemble::Tree::from_nodes(vec![
            crate::ensemble::TreeNode {
                split_feature: Some(0),
                split_threshold: 0.5,
                left: 1,
                right: 2,
                leaf_value: [0.0, 0.0],
                n_train: 2,
            },
            crate::ensemble::TreeNode {
                split_feature: None,
                split_threshold: 0.0,
                left: 0,
                right: 0,
                leaf_value: [1.0, 0.0],
                n_train: 1,
            },
            crate::ensemble::TreeNode {
                split_feature: None,
                split_threshold: 0.0,
                left: 0,
                right: 0,
                leaf_value: [0.0, 1.0],
                n_train: 1,
            },
        ])
        .unwrap();
        let m = EnsembleModel::from_parts(EnsembleConfig::bagging(1, Some(1)), 1, vec![stump], vec![1.0], 0.0);
        assert_eq!(m.node_count(), 3);
        assert_eq!(m.size().serialized_bytes, m.to_bytes().len());

        let empty = EnsembleModel::constant(EnsembleConfig::gradient_boosting(5, 3), 1, Label::Normal);
        assert_eq!(empty.node_count(), 0);
        assert_eq!(empty.predict_proba(&[3.0]).unwrap(), DistributionVector::CERTAIN_NORMAL);
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(800.0) <= 1.0);
        assert!(sigmoid(-800.0) >= 0.0);
        assert!((sigmoid(2.0) + sigmoid(-2.0) - 1.0).abs() < 1e-15);
    }
}
