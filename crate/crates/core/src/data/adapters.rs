//! Adapters for the three public benchmark corpora.
//!
//! Each adapter reads the file in its published layout and produces the binary
//! Normal/Anomaly task used throughout the crate.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::csv_io::load_csv_reader;
use crate::data::{CsvSchema, Dataset, Label, LabelRule, Provenance};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdapterKind {
    Kdd,
    Ccf,
    Fc,
    /// Already in the canonical `label` 0/1 layout.
    Csv,
}

impl AdapterKind {
    /// Provenance of data read through this adapter.
    pub fn provenance(self, path: &Path) -> Provenance {
        match self {
            AdapterKind::Kdd => Provenance::Kdd,
            AdapterKind::Ccf => Provenance::Ccf,
            AdapterKind::Fc => Provenance::Fc,
            AdapterKind::Csv => Provenance::File(path.display().to_string()),
        }
    }

    pub fn load(self, path: &Path) -> Result<Dataset> {
        match self {
            AdapterKind::Kdd => adapt_kdd(File::open(path)?, KddOptions::default()),
            AdapterKind::Ccf => adapt_ccf(File::open(path)?),
            AdapterKind::Fc => adapt_fc(File::open(path)?),
            AdapterKind::Csv => crate::data::load_csv(path, &CsvSchema::canonical()),
        }
    }
}

impl FromStr for AdapterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kdd" => Ok(AdapterKind::Kdd),
            "ccf" => Ok(AdapterKind::Ccf),
            "fc" => Ok(AdapterKind::Fc),
            "csv" => Ok(AdapterKind::Csv),
            other => Err(Error::config(format!("unknown adapter `{other}` (kdd, ccf, fc, csv)"))),
        }
    }
}

const KDD_COLUMNS: [&str; 41] = [
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
];

/// Columns of the KDD record that hold symbolic values.
const KDD_CATEGORICAL: [usize; 3] = [1, 2, 3];

#[derive(Debug, Clone, Copy)]
pub struct KddOptions {
    /// Drop exact duplicate records (the raw file is dominated by repeats).
    pub dedup: bool,
}

impl Default for KddOptions {
    fn default() -> Self {
        KddOptions { dedup: true }
    }
}

/// KDD Cup 1999 (`kddcup.data` or the 10% file): 41 attributes plus a label
/// such as `normal.` or `smurf.`. Every non-normal label is an anomaly and the
/// three symbolic columns are one-hot encoded with a sorted vocabulary.
pub fn adapt_kdd<R: Read>(raw: R, opts: KddOptions) -> Result<Dataset> {
    crate::eval::note_io();
    let mut records: Vec<Vec<String>> = Vec::new();
    let mut row_ids = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (line_no, line) in BufReader::new(raw).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != KDD_COLUMNS.len() + 1 {
            return Err(Error::data(format!(
                "kdd schema mismatch on line {}: {} fields, expected {}",
                line_no + 1,
                fields.len(),
                KDD_COLUMNS.len() + 1
            )));
        }
        if line_no == 0 && fields[0].parse::<f64>().is_err() {
            continue; // header
        }
        if opts.dedup && !seen.insert(line.to_string()) {
            continue;
        }
        records.push(fields);
        row_ids.push(line_no as u64);
    }
    drop(seen);
    if records.is_empty() {
        return Err(Error::data("kdd file has no records"));
    }

    let vocab: Vec<Vec<String>> = KDD_CATEGORICAL
        .iter()
        .map(|&c| {
            records
                .iter()
                .map(|r| r[c].clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();

    let mut names = Vec::new();
    for (c, name) in KDD_COLUMNS.iter().enumerate() {
        match KDD_CATEGORICAL.iter().position(|&k| k == c) {
            Some(k) => names.extend(vocab[k].iter().map(|v| format!("{name}={v}"))),
            None => names.push(name.to_string()),
        }
    }

    let n_features = names.len();
    let mut features = Vec::with_capacity(records.len() * n_features);
    let mut labels = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        for (c, cell) in r[..KDD_COLUMNS.len()].iter().enumerate() {
            match KDD_CATEGORICAL.iter().position(|&k| k == c) {
                Some(k) => {
                    features.extend(vocab[k].iter().map(|v| if v == cell { 1.0 } else { 0.0 }))
                }
                None => features.push(cell.parse::<f64>().map_err(|_| Error::Cell {
                    row: row_ids[i] as usize,
                    column: KDD_COLUMNS[c].to_string(),
                    reason: format!("non-numeric value `{cell}`"),
                })?),
            }
        }
        let label = r[KDD_COLUMNS.len()].trim_end_matches('.');
        labels.push(if label == "normal" { Label::Normal } else { Label::Anomaly });
    }
    Dataset::with_row_ids(features, n_features, labels, row_ids, Provenance::Kdd)?
        .with_feature_names(names)
}

/// Credit-card fraud (`creditcard.csv`): `Time`, `V1`..`V28`, `Amount`,
/// `Class`. All 30 numeric columns are kept; `Class == 1` is an anomaly.
pub fn adapt_ccf<R: Read>(raw: R) -> Result<Dataset> {
    let schema = CsvSchema::new("Class", LabelRule::Equals("1".into()));
    let (data, _) = load_csv_reader(raw, &schema, Provenance::Ccf)?;
    let mut expected = vec!["Time".to_string()];
    expected.extend((1..=28).map(|i| format!("V{i}")));
    expected.push("Amount".to_string());
    if data.feature_names() != expected.as_slice() {
        return Err(Error::data(
            "ccf schema mismatch: expected Time, V1..V28, Amount, Class",
        ));
    }
    Ok(data)
}

const FC_CONTINUOUS: [&str; 10] = [
    "Elevation",
    "Aspect",
    "Slope",
    "Horizontal_Distance_To_Hydrology",
    "Vertical_Distance_To_Hydrology",
    "Horizontal_Distance_To_Roadways",
    "Hillshade_9am",
    "Hillshade_Noon",
    "Hillshade_3pm",
    "Horizontal_Distance_To_Fire_Points",
];

/// Forest cover type (`covtype.data`): 54 attributes plus `Cover_Type` 1..7.
/// Only types 2 (Normal) and 4 (Anomaly) are kept.
pub fn adapt_fc<R: Read>(raw: R) -> Result<Dataset> {
    crate::eval::note_io();
    let mut names: Vec<String> = FC_CONTINUOUS.iter().map(|s| s.to_string()).collect();
    names.extend((1..=4).map(|i| format!("Wilderness_Area{i}")));
    names.extend((1..=40).map(|i| format!("Soil_Type{i}")));
    let n_features = names.len();

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut row_ids = Vec::new();
    for (line_no, line) in BufReader::new(raw).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != n_features + 1 {
            return Err(Error::data(format!(
                "fc schema mismatch on line {}: {} fields, expected {}",
                line_no + 1,
                fields.len(),
                n_features + 1
            )));
        }
        if line_no == 0 && fields[0].parse::<f64>().is_err() {
            continue;
        }
        let label = match fields[n_features] {
            "2" => Label::Normal,
            "4" => Label::Anomaly,
            _ => continue,
        };
        for (c, cell) in fields[..n_features].iter().enumerate() {
            features.push(cell.parse::<f64>().map_err(|_| Error::Cell {
                row: line_no,
                column: names[c].clone(),
                reason: format!("non-numeric value `{cell}`"),
            })?);
        }
        labels.push(label);
        row_ids.push(line_no as u64);
    }
    if labels.is_empty() {
        return Err(Error::data("fc file has no class 2/4 records"));
    }
    Dataset::with_row_ids(features, n_features, labels, row_ids, Provenance::Fc)?
        .with_feature_names(names)
}
