use serde::{Deserialize, Serialize};

use crate::eval::EvalReport;

/// Baseline-over-cascade ratios; above 1 means the cascade is smaller or
/// faster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchComparison {
    pub baseline: EvalReport,
    pub cascade: EvalReport,
    /// Node count ratio.
    pub size_ratio: f64,
    pub bytes_ratio: f64,
    pub train_ratio: f64,
    pub latency_ratio: f64,
    /// Baseline mean latency over cascade worst-case latency.
    pub worst_case_latency_ratio: f64,
    /// Cascade anomaly F1 minus baseline anomaly F1.
    pub anomaly_f1_delta: f64,
    pub normal_f1_delta: f64,
}

impl BenchComparison {
    pub fn new(baseline: EvalReport, cascade: EvalReport) -> Self {
        let ratio = |b: f64, c: f64| if c > 0.0 { b / c } else { f64::INFINITY };
        BenchComparison {
            size_ratio: ratio(baseline.node_count, cascade.node_count),
            bytes_ratio: ratio(baseline.serialized_bytes, cascade.serialized_bytes),
            train_ratio: ratio(baseline.train_seconds, cascade.train_seconds),
            latency_ratio: ratio(baseline.mean_latency_us, cascade.mean_latency_us),
            worst_case_latency_ratio: ratio(baseline.mean_latency_us, cascade.worst_case_latency_us),
            anomaly_f1_delta: cascade.f1_anomaly - baseline.f1_anomaly,
            normal_f1_delta: cascade.f1_normal - baseline.f1_normal,
            baseline,
            cascade,
        }
    }

    /// Both reports followed by the ratio line.
    pub fn table(&self) -> String {
        let mut out = EvalReport::table(&[self.baseline.clone(), self.cascade.clone()]);
        out.push_str(&format!(
            "\nsize x{:.2}  bytes x{:.2}  train x{:.2}  latency x{:.2}  worst-case x{:.2}  anomaly F1 {:+.6}\n",
            self.size_ratio,
            self.bytes_ratio,
            self.train_ratio,
            self.latency_ratio,
            self.worst_case_latency_ratio,
            self.anomaly_f1_delta
        ));
        out
    }
}
