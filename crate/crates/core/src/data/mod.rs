//! Datasets and everything that produces them.

mod adapters;
mod csv_io;
mod manifest;
mod sample;
mod synthetic;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use adapters::{adapt_ccf, adapt_fc, adapt_kdd, AdapterKind, KddOptions};
pub use csv_io::{
    load_csv, load_csv_reader, write_csv, write_csv_writer, CsvSchema, LabelRule, RejectedRow,
};
pub use manifest::{sha256_file, Manifest, ManifestEntry};
pub use sample::subsample;
pub use synthetic::make_synthetic;

/// Binary class label. `Anomaly` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Normal = 0,
    Anomaly = 1,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Normal, Label::Anomaly];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn from_index(i: usize) -> Label {
        if i == 0 {
            Label::Normal
        } else {
            Label::Anomaly
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Normal => Label::Anomaly,
            Label::Anomaly => Label::Normal,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Normal => f.write_str("Normal"),
            Label::Anomaly => f.write_str("Anomaly"),
        }
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Kdd,
    Ccf,
    Fc,
    Synthetic,
    File(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Kdd => f.write_str("kdd"),
            Provenance::Ccf => f.write_str("ccf"),
            Provenance::Fc => f.write_str("fc"),
            Provenance::Synthetic => f.write_str("synthetic"),
            Provenance::File(p) => write!(f, "file:{p}"),
        }
    }
}

/// Published facts about one of the benchmark corpora.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub name: &'static str,
    pub expected_anomaly_rate: f64,
    pub label_rule: &'static str,
}

impl DatasetSpec {
    pub const KDD: DatasetSpec = DatasetSpec {
        name: "kdd",
        expected_anomaly_rate: 0.24389,
        label_rule: "label != \"normal.\" -> Anomaly (after removing duplicate records)",
    };
    pub const CCF: DatasetSpec = DatasetSpec {
        name: "ccf",
        expected_anomaly_rate: 0.00172,
        label_rule: "Class == 1 -> Anomaly",
    };
    pub const FC: DatasetSpec = DatasetSpec {
        name: "fc",
        expected_anomaly_rate: 0.009,
        label_rule: "Cover_Type 2 -> Normal, 4 -> Anomaly, others dropped",
    };
}

/// Dense, immutable binary-labelled dataset.
///
/// Features are stored row-major. Every row carries a stable `row_id` that
/// survives subsetting, so derived sets can be audited against the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<Label>,
    feature_names: Vec<String>,
    row_ids: Vec<u64>,
    source: Provenance,
}

impl Dataset {
    /// Builds a dataset with row ids `0..n`.
    pub fn new(
        features: Vec<f64>,
        n_features: usize,
        labels: Vec<Label>,
        source: Provenance,
    ) -> Result<Self> {
        let n = labels.len();
        Self::with_row_ids(features, n_features, labels, (0..n as u64).collect(), source)
    }

    pub fn with_row_ids(
        features: Vec<f64>,
        n_features: usize,
        labels: Vec<Label>,
        row_ids: Vec<u64>,
        source: Provenance,
    ) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::data("dataset needs at least one feature"));
        }
        if features.len() != labels.len() * n_features {
            return Err(Error::data(format!(
                "feature matrix has {} values, expected {} rows x {} features",
                features.len(),
                labels.len(),
                n_features
            )));
        }
        if row_ids.len() != labels.len() {
            return Err(Error::data("row_ids length differs from labels length"));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::Cell {
                row: pos / n_features,
                column: format!("#{}", pos % n_features),
                reason: "non-finite value".into(),
            });
        }
        let mut seen = HashSet::with_capacity(row_ids.len());
        if let Some(dup) = row_ids.iter().find(|id| !seen.insert(**id)) {
            return Err(Error::data(format!("duplicate row id {dup}")));
        }
        let feature_names = (0..n_features).map(|i| format!("f{i}")).collect();
        Ok(Dataset {
            features,
            n_features,
            labels,
            feature_names,
            row_ids,
            source,
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features {
            return Err(Error::data(format!(
                "{} feature names for {} features",
                names.len(),
                self.n_features
            )));
        }
        self.feature_names = names;
        Ok(self)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    #[inline]
    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.features[row * self.n_features + feature]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.n_features)
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn row_ids(&self) -> &[u64] {
        &self.row_ids
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn source(&self) -> &Provenance {
        &self.source
    }

    /// `[normal, anomaly]` row counts.
    pub fn class_counts(&self) -> [usize; 2] {
        let anomalies = self.labels.iter().filter(|l| **l == Label::Anomaly).count();
        [self.labels.len() - anomalies, anomalies]
    }

    pub fn anomaly_rate(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.class_counts()[1] as f64 / self.n_rows() as f64
    }

    /// Normal-to-anomaly instance ratio; `None` without anomalies.
    pub fn normal_anomaly_ratio(&self) -> Option<f64> {
        let [n, a] = self.class_counts();
        (a > 0).then(|| n as f64 / a as f64)
    }

    pub fn has_both_classes(&self) -> bool {
        let [n, a] = self.class_counts();
        n > 0 && a > 0
    }

    /// Rows at `indices` in the given order, keeping their row ids.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        let mut row_ids = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
            row_ids.push(self.row_ids[i]);
        }
        Dataset {
            features,
            n_features: self.n_features,
            labels,
            feature_names: self.feature_names.clone(),
            row_ids,
            source: self.source.clone(),
        }
    }

    /// Column-major copy of the feature matrix.
    pub(crate) fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n_features)
            .map(|f| self.rows().map(|r| r[f]).collect())
            .collect()
    }
}
