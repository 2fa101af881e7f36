use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{Dataset, Label, Provenance};
use crate::{Error, Result};

/// Two unit-variance Gaussian clusters. The anomaly centroid sits at distance
/// `class_separation` from the normal centroid (the origin), along the
/// all-ones diagonal.
pub fn make_synthetic(
    n_rows: usize,
    n_features: usize,
    anomaly_rate: f64,
    class_separation: f64,
    seed: u64,
) -> Result<Dataset> {
    if !(anomaly_rate > 0.0 && anomaly_rate < 0.5) {
        return Err(Error::invalid(format!(
            "anomaly_rate must be in (0, 0.5), got {anomaly_rate}"
        )));
    }
    if class_separation < 0.0 || !class_separation.is_finite() {
        return Err(Error::invalid("class_separation must be finite and >= 0"));
    }
    if n_rows < 2 || n_features == 0 {
        return Err(Error::invalid("need at least 2 rows and 1 feature"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_anomalies = ((n_rows as f64 * anomaly_rate).round() as usize).clamp(1, n_rows - 1);
    let mut labels: Vec<Label> = (0..n_rows)
        .map(|i| if i < n_anomalies { Label::Anomaly } else { Label::Normal })
        .collect();
    labels.shuffle(&mut rng);

    let offset = class_separation / (n_features as f64).sqrt();
    let mut features = Vec::with_capacity(n_rows * n_features);
    for &label in &labels {
        let shift = if label == Label::Anomaly { offset } else { 0.0 };
        for _ in 0..n_features {
            let z: f64 = StandardNormal.sample(&mut rng);
            features.push(z + shift);
        }
    }
    Dataset::new(features, n_features, labels, Provenance::Synthetic)
}
