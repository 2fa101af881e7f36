//! Trains each learner on the same synthetic task and compares held-out F1
//! and model size.

use cascade_forest::prelude::*;

fn main() -> Result<()> {
    let data = make_synthetic(4000, 8, 0.05, 2.5, 42)?;
    let (train, test) = split(&data, 3000);

    for cfg in [
        EnsembleConfig::bagging(50, None),
        EnsembleConfig::gradient_boosting(100, 3),
        EnsembleConfig::adaboost(100, 2),
    ] {
        let cfg = cfg.with_seed(7);
        let model = EnsembleModel::fit(&train, &cfg)?;
        let preds = test.rows().map(|x| model.predict(x)).collect::<Result<Vec<_>>>()?;
        let f1 = per_class_f1(&preds, test.labels())?;
        println!(
            "{:<18} {:<12} trees {:>4}  nodes {:>6}  F1 normal {:.4}  anomaly {:.4}",
            cfg.method.to_string(),
            cfg.literal(),
            model.n_trees(),
            model.node_count(),
            f1.normal,
            f1.anomaly
        );
    }
    Ok(())
}

fn split(data: &Dataset, at: usize) -> (Dataset, Dataset) {
    let head: Vec<usize> = (0..at).collect();
    let tail: Vec<usize> = (at..data.n_rows()).collect();
    (data.select(&head), data.select(&tail))
}
