//! How much of each class a coarse model answers confidently, and how well,
//! as the confidence threshold rises.

use cascade_forest::cascade::{sweep_cct, threshold_lattice};
use cascade_forest::prelude::*;

fn main() -> Result<()> {
    let data = make_synthetic(6000, 6, 0.05, 2.0, 8)?;
    let train = data.select(&(0..4500).collect::<Vec<_>>());
    let test = data.select(&(4500..6000).collect::<Vec<_>>());
    let coarse = EnsembleModel::fit(&train, &EnsembleConfig::bagging(20, Some(10)).with_seed(2))?;

    println!("{:>6} {:>9} {:>9} {:>9} {:>9}", "t", "valid N", "valid A", "F1 N", "F1 A");
    let show = |v: Option<f64>| v.map_or("-".to_string(), |f| format!("{f:.4}"));
    for p in sweep_cct(&coarse, &test, &threshold_lattice(0.05)?)? {
        println!(
            "{:>6.3} {:>9.4} {:>9.4} {:>9} {:>9}",
            p.threshold,
            p.valid_fraction_normal,
            p.valid_fraction_anomaly,
            show(p.f1_normal),
            show(p.f1_anomaly)
        );
    }
    Ok(())
}
