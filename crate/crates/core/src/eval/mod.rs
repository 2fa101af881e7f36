//! Per-class F1, stratified folds, cross-validated reports and latency.

mod bench;
mod kfold;
mod latency;
mod report;
mod sweeps;

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::{Error, Result};

pub use bench::BenchComparison;
pub use kfold::{stratified_kfold, Fold};
pub use latency::{
    io_calls_while_timing, measure_latency, time_queries, LatencyOptions, LatencyStats,
    LatencySubject,
};
pub(crate) use latency::note_io;
pub use report::{
    evaluate_baseline_cv, evaluate_cascade_cv, EvalOptions, EvalReport, FoldReport, MachineInfo,
    ModelKind,
};
pub(crate) use report::cascade_fold_metrics;
pub use sweeps::{
    cascade_threshold_sweep, sweep_cct_cv, write_csv_rows, CascadeSweepRow, CctSweepRow,
};

/// One-vs-rest counts for a single class of interest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: u64,
    pub false_pos: u64,
    pub false_neg: u64,
    pub true_neg: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    /// Zero when nothing was predicted positive.
    pub fn precision(&self) -> f64 {
        ratio(self.true_pos, self.true_pos + self.false_pos)
    }

    /// Zero when the class never occurs.
    pub fn recall(&self) -> f64 {
        ratio(self.true_pos, self.true_pos + self.false_neg)
    }

    /// Harmonic mean of precision and recall, zero when both are zero.
    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// 2x2 table indexed `[truth][prediction]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    counts: [[u64; 2]; 2],
}

impl ConfusionMatrix {
    #[inline]
    pub fn add(&mut self, truth: Label, predicted: Label) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn from_pairs(predictions: &[Label], labels: &[Label]) -> Self {
        let mut m = Self::default();
        for (p, t) in predictions.iter().zip(labels) {
            m.add(*t, *p);
        }
        m
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Rows per true class.
    pub fn label_counts(&self) -> [usize; 2] {
        [
            (self.counts[0][0] + self.counts[0][1]) as usize,
            (self.counts[1][0] + self.counts[1][1]) as usize,
        ]
    }

    pub fn class(&self, c: Label) -> ConfusionCounts {
        let (i, j) = (c.index(), c.other().index());
        ConfusionCounts {
            true_pos: self.counts[i][i],
            false_pos: self.counts[j][i],
            false_neg: self.counts[i][j],
            true_neg: self.counts[j][j],
        }
    }

    pub fn f1(&self) -> ClassF1 {
        ClassF1 {
            normal: self.class(Label::Normal).f1(),
            anomaly: self.class(Label::Anomaly).f1(),
        }
    }
}

/// F1 for each class.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassF1 {
    pub normal: f64,
    pub anomaly: f64,
}

impl ClassF1 {
    pub fn get(&self, label: Label) -> f64 {
        match label {
            Label::Normal => self.normal,
            Label::Anomaly => self.anomaly,
        }
    }
}

/// Per-class F1 of `predictions` against `labels`.
pub fn per_class_f1(predictions: &[Label], labels: &[Label]) -> Result<ClassF1> {
    if predictions.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::invalid("no predictions to score"));
    }
    Ok(ConfusionMatrix::from_pairs(predictions, labels).f1())
}

/// Mean and sample variance (zero for fewer than two values).
pub(crate) fn mean_var(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}
