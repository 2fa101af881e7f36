//! Five-fold evaluation of a baseline and a cascade, printed side by side.

use cascade_forest::eval::{evaluate_baseline_cv, evaluate_cascade_cv};
use cascade_forest::prelude::*;

fn main() -> Result<()> {
    let data = make_synthetic(5000, 6, 0.05, 2.0, 5)?;
    let opts = EvalOptions { seed: 9, ..EvalOptions::default() };
    let baseline = evaluate_baseline_cv(&data, &EnsembleConfig::bagging(60, None).with_seed(9), &opts)?;
    let cascade = evaluate_cascade_cv(
        &data,
        &CascadeConfig::parse_literal("R(C(8,6),C(20,12),0.95,0.98)", Method::Bagging)?.with_seed(9),
        &opts,
    )?;
    print!("{}", EvalReport::table(&[baseline, cascade]));
    Ok(())
}
