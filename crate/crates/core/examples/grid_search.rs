//! Searches member sizes and threshold pairs by cross-validation and prints
//! the best settings.

use cascade_forest::cascade::{grid_search, rank, ThresholdGrid};
use cascade_forest::eval::LatencyOptions;
use cascade_forest::prelude::*;

fn main() -> Result<()> {
    let data = make_synthetic(2000, 5, 0.08, 2.0, 21)?;
    let coarse = [EnsembleConfig::bagging(4, Some(4)), EnsembleConfig::bagging(8, Some(6))];
    let expert = [EnsembleConfig::bagging(12, Some(10))];
    let grid = ThresholdGrid::Pairs(vec![(0.8, 0.9), (0.9, 0.95), (0.95, 0.99)]);
    let opts = EvalOptions {
        folds: 3,
        seed: 4,
        latency: LatencyOptions { warmup: 20, repetitions: 200 },
    };
    let mut entries = grid_search(&data, &coarse, &expert, &grid, &opts)?;
    rank(&mut entries);
    for e in entries.iter().take(5) {
        println!(
            "{:<32} anomaly F1 {:.4}  latency {:.2}us",
            e.config.literal(),
            e.report.f1_anomaly,
            e.report.mean_latency_us
        );
    }
    Ok(())
}
