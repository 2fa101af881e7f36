//! Single-query latency of a large baseline against a cascade.

use cascade_forest::eval::{measure_latency, LatencyOptions, LatencySubject};
use cascade_forest::prelude::*;

fn main() -> Result<()> {
    let data = make_synthetic(8000, 10, 0.05, 3.0, 17)?;
    let baseline = EnsembleModel::fit(&data, &EnsembleConfig::bagging(150, None).with_seed(1))?;
    let cascade = CascadeModel::train(
        &data,
        &CascadeConfig::parse_literal("R(C(10,10),C(20,20),0.98,0.995)", Method::Bagging)?.with_seed(1),
    )?;
    let opts = LatencyOptions::default();
    let b = measure_latency(LatencySubject::Ensemble(&baseline), &data, &opts)?;
    let c = measure_latency(LatencySubject::Cascade(&cascade), &data, &opts)?;
    println!("baseline mean {:>8.2}us  p99 {:>8.2}us", b.mean_us, b.p99_us);
    println!(
        "cascade  mean {:>8.2}us  p99 {:>8.2}us  worst-case {:>8.2}us",
        c.mean_us, c.p99_us, c.worst_case_us
    );
    println!("speedup x{:.2}", b.mean_us / c.mean_us);
    Ok(())
}
