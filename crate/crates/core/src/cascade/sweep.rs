use serde::{Deserialize, Serialize};

use crate::cascade::score_rows;
use crate::data::{Dataset, Label};
use crate::ensemble::{DistributionVector, Predictor};
use crate::eval::{ClassF1, ConfusionMatrix};
use crate::{Error, Result};

/// Coarse-model quality restricted to rows at or above one confidence
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub threshold: f64,
    /// Share of the true-Normal rows that clear the threshold.
    pub valid_fraction_normal: f64,
    pub valid_fraction_anomaly: f64,
    /// F1 over the cleared rows; `None` when no row of that class cleared.
    pub f1_normal: Option<f64>,
    pub f1_anomaly: Option<f64>,
}

impl SweepPoint {
    pub fn f1(&self, label: Label) -> Option<f64> {
        match label {
            Label::Normal => self.f1_normal,
            Label::Anomaly => self.f1_anomaly,
        }
    }
}

/// Valid fractions and valid-set F1 of `model` on `data` at each threshold.
/// Thresholds must be ascending and within `[0.5, 1]`.
pub fn sweep_cct<P: Predictor + ?Sized>(
    model: &P,
    data: &Dataset,
    thresholds: &[f64],
) -> Result<Vec<SweepPoint>> {
    let scores = score_rows(model, data)?;
    sweep_scores(&scores, data.labels(), thresholds)
}

/// [`sweep_cct`] over precomputed scores.
pub fn sweep_scores(
    scores: &[DistributionVector],
    labels: &[Label],
    thresholds: &[f64],
) -> Result<Vec<SweepPoint>> {
    check_thresholds(thresholds)?;
    if scores.len() != labels.len() {
        return Err(Error::invalid("scores and labels differ in length"));
    }
    let totals = labels.iter().fold([0usize; 2], |mut acc, l| {
        acc[l.index()] += 1;
        acc
    });
    let frac = |valid: usize, total: usize| if total == 0 { 0.0 } else { valid as f64 / total as f64 };
    Ok(thresholds
        .iter()
        .map(|&t| {
            let mut cm = ConfusionMatrix::default();
            for (d, label) in scores.iter().zip(labels) {
                if d.confidence() >= t {
                    cm.add(*label, d.argmax());
                }
            }
            let valid = cm.label_counts();
            let f1 = cm.f1();
            SweepPoint {
                threshold: t,
                valid_fraction_normal: frac(valid[0], totals[0]),
                valid_fraction_anomaly: frac(valid[1], totals[1]),
                f1_normal: (valid[0] > 0).then_some(f1.normal),
                f1_anomaly: (valid[1] > 0).then_some(f1.anomaly),
            }
        })
        .collect())
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.iter().any(|t| !(0.5..=1.0).contains(t)) {
        return Err(Error::invalid("sweep thresholds must lie in [0.5, 1]"));
    }
    if thresholds.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("sweep thresholds must be ascending"));
    }
    Ok(())
}

/// Lowest threshold whose valid-set F1 beats `baseline` for both classes.
pub fn find_lowest_beating_cct(sweep: &[SweepPoint], baseline: &ClassF1) -> Option<f64> {
    sweep
        .iter()
        .find(|p| {
            Label::ALL
                .iter()
                .all(|&l| p.f1(l).is_some_and(|f| f > baseline.get(l)))
        })
        .map(|p| p.threshold)
}

/// `0.5, 0.5 + step, ..., 1.0`. The step must split `[0.5, 1]` evenly.
pub fn threshold_lattice(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::config(format!("threshold step must be in (0, 0.5], got {step}")));
    }
    let steps = 0.5 / step;
    let n = steps.round();
    if (steps - n).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::config(format!("step {step} does not divide [0.5, 1] evenly")));
    }
    let n = n as usize;
    Ok((0..=n).map(|i| (n + i) as f64 / (2 * n) as f64).collect())
}
