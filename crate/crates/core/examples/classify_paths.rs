//! Classifies held-out rows and counts which path answered them.

use cascade_forest::prelude::*;

fn main() -> Result<()> {
    let data = make_synthetic(5000, 5, 0.05, 2.0, 3)?;
    let train = data.select(&(0..4000).collect::<Vec<_>>());
    let test = data.select(&(4000..5000).collect::<Vec<_>>());
    let config = CascadeConfig::new(
        EnsembleConfig::bagging(8, Some(5)),
        EnsembleConfig::bagging(25, Some(12)),
        0.9,
        0.97,
    )?
    .with_seed(1);
    let model = CascadeModel::train(&train, &config)?;

    let mut counts = [0usize; 3];
    let mut preds = Vec::with_capacity(test.n_rows());
    for x in test.rows() {
        let r = model.classify(x)?;
        counts[r.path.index()] += 1;
        preds.push(r.label);
    }
    for path in Path::ALL {
        println!("{:<10} {:>5}", format!("{path:?}"), counts[path.index()]);
    }
    let f1 = per_class_f1(&preds, test.labels())?;
    println!("F1 normal {:.4}  anomaly {:.4}", f1.normal, f1.anomaly);

    let r = model.classify(test.row(0))?;
    println!(
        "row 0: {} via {:?}, coarse {:?}, expert {:?}",
        r.label, r.path, r.coarse_distribution, r.expert_distribution
    );
    Ok(())
}
