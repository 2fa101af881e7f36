//! Trains a cascade and reports how the training set was split between the
//! two experts.

use cascade_forest::prelude::*;

fn main() -> Result<()> {
    let data = make_synthetic(6000, 6, 0.04, 2.0, 11)?;
    let config = CascadeConfig::parse_literal("R(C(10,6),C(30,12),0.95,0.98)", Method::Bagging)?
        .with_seed(5);
    let model = CascadeModel::train(&data, &config)?;
    let stats = model.training_stats();

    println!("{config}");
    println!("coarse nodes      {}", model.coarse().node_count());
    for path in [Path::Expert1, Path::Expert2] {
        let expert = model.expert(path).expect("expert path");
        println!(
            "{path:?} nodes {:>6}  degenerate {}",
            expert.node_count(),
            expert.is_degenerate()
        );
    }
    println!("expert1 share     {:.4}", stats.fg1_train_fraction);
    println!("expert2 share     {:.4}", stats.fg2_train_fraction);
    println!("duplicated rows   {}", stats.duplicated_anomaly_count);
    println!("normal/anomaly    {:?} / {:?}", stats.fg1_ratio, stats.fg2_ratio);
    Ok(())
}
