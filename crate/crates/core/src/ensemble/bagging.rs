use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::Dataset;
use crate::ensemble::tree::{grow, GiniCriterion, TrainMatrix};
use crate::ensemble::{EnsembleConfig, EnsembleModel, Method, TreeParams};
use crate::{Error, Result};

/// Per-tree random stream: same seed, one ChaCha stream per tree index.
pub(crate) fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

/// Random-forest style bagging: each tree sees a bootstrap resample of the
/// rows (as integer multiplicity weights) and a random feature subset at every
/// split. Trees are grown in parallel; the per-tree streams make the result
/// independent of the worker count.
pub fn fit_bagging(data: &Dataset, config: &EnsembleConfig) -> Result<EnsembleModel> {
    if config.method != Method::Bagging {
        return Err(Error::config(format!("fit_bagging called with {}", config.method)));
    }
    config.validate()?;
    if data.is_empty() {
        return Err(Error::invalid("cannot fit on an empty dataset"));
    }
    let n = data.n_rows();
    let params = TreeParams {
        max_depth: config.max_depth,
        min_samples_leaf: config.min_samples_leaf,
        feature_subsample: config.resolved_feature_fraction(data.n_features()),
    };
    let matrix = TrainMatrix::new(data);
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(config.seed, t);
            let weights = if config.bootstrap {
                let mut w = vec![0.0f64; n];
                for _ in 0..n {
                    w[rng.gen_range(0..n)] += 1.0;
                }
                w
            } else {
                vec![1.0; n]
            };
            let crit = GiniCriterion::new(data.labels(), &weights);
            grow(&matrix, &crit, &params, &mut rng).tree
        })
        .collect::<Vec<_>>();
    let weights = vec![1.0; trees.len()];
    Ok(EnsembleModel::from_parts(
        config.clone(),
        data.n_features(),
        trees,
        weights,
        0.0,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_synthetic, Label};
    use crate::ensemble::{fit_tree, Predictor};

    #[test]
    fn one_tree_without_bootstrap_matches_fit_tree() {
        let d = make_synthetic(150, 3, 0.2, 1.5, 8).unwrap();
        let cfg = EnsembleConfig::bagging(1, None)
            .with_feature_subsample(1.0)
            .with_bootstrap(false)
            .with_seed(4);
        let model = fit_bagging(&d, &cfg).unwrap();
        let tree = fit_tree(
            &d,
            &vec![1.0; d.n_rows()],
            &TreeParams::default(),
            &mut tree_rng(4, 0),
        )
        .unwrap();
        assert_eq!(model.trees()[0], tree);
    }

    #[test]
    fn unlimited_depth_model_has_requested_trees() {
        let d = make_synthetic(300, 4, 0.1, 2.0, 1).unwrap();
        let m = fit_bagging(&d, &EnsembleConfig::bagging(12, None)).unwrap();
        assert_eq!(m.n_trees(), 12);
        assert!(m.tree_weights().iter().all(|w| *w == 1.0));
    }

    #[test]
    fn separable_data_fits_perfectly() {
        let d = make_synthetic(500, 2, 0.2, 12.0, 3).unwrap();
        let m = fit_bagging(&d, &EnsembleConfig::bagging(50, None).with_seed(9)).unwrap();
        let correct = (0..d.n_rows())
            .filter(|&i| m.predict(d.row(i)).unwrap() == d.label(i))
            .count();
        assert_eq!(correct, d.n_rows());
    }

    #[test]
    fn single_class_gives_certain_leaves() {
        let d = make_synthetic(40, 2, 0.1, 1.0, 3).unwrap();
        let normals: Vec<usize> = (0..d.n_rows()).filter(|&i| d.label(i) == Label::Normal).collect();
        let only = d.select(&normals);
        let m = fit_bagging(&only, &EnsembleConfig::bagging(3, Some(4))).unwrap();
        assert_eq!(m.node_count(), 3);
        assert_eq!(m.predict(only.row(0)).unwrap(), Label::Normal);
    }

    #[test]
    fn wrong_method_rejected() {
        let d = make_synthetic(40, 2, 0.1, 1.0, 3).unwrap();
        assert!(fit_bagging(&d, &EnsembleConfig::adaboost(3, 2)).is_err());
    }
}
