use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::data::{Dataset, Label, Provenance};
use crate::{Error, Result};

/// Maps a raw label cell to a binary label. `None` drops the row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelRule {
    /// Cell equal to the value is an anomaly, everything else normal.
    Equals(String),
    /// Cell equal to the value is normal, everything else an anomaly.
    NotEquals(String),
    /// Explicit value lists; rows matching neither list are dropped.
    Classes {
        normal: Vec<String>,
        anomaly: Vec<String>,
    },
}

impl LabelRule {
    /// Parses `==bad`, `!=normal.`, or the same with a leading column name and
    /// optional quotes, e.g. `y=="bad"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (op, rest) = if let Some(i) = s.find("==") {
            ("==", &s[i + 2..])
        } else if let Some(i) = s.find("!=") {
            ("!=", &s[i + 2..])
        } else {
            return Err(Error::config(format!("label rule `{s}` needs == or !=")));
        };
        let value = rest.trim().trim_matches('"').to_string();
        Ok(match op {
            "==" => LabelRule::Equals(value),
            _ => LabelRule::NotEquals(value),
        })
    }

    pub fn apply(&self, raw: &str) -> Option<Label> {
        let raw = raw.trim();
        match self {
            LabelRule::Equals(v) => Some(if raw == v { Label::Anomaly } else { Label::Normal }),
            LabelRule::NotEquals(v) => Some(if raw == v { Label::Normal } else { Label::Anomaly }),
            LabelRule::Classes { normal, anomaly } => {
                if normal.iter().any(|v| v == raw) {
                    Some(Label::Normal)
                } else if anomaly.iter().any(|v| v == raw) {
                    Some(Label::Anomaly)
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub label_column: String,
    pub rule: LabelRule,
    /// Drop rows with missing or non-numeric features instead of failing.
    pub allow_drop: bool,
    /// Columns to ignore entirely.
    pub skip_columns: Vec<String>,
}

impl CsvSchema {
    pub fn new(label_column: impl Into<String>, rule: LabelRule) -> Self {
        CsvSchema {
            label_column: label_column.into(),
            rule,
            allow_drop: false,
            skip_columns: Vec::new(),
        }
    }

    /// Layout written by [`write_csv`]: a `label` column holding 0/1.
    pub fn canonical() -> Self {
        CsvSchema::new("label", LabelRule::Equals("1".into()))
    }

    pub fn allow_drop(mut self, yes: bool) -> Self {
        self.allow_drop = yes;
        self
    }
}

/// A data row that could not be ingested.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedRow {
    pub row: usize,
    pub column: String,
    pub reason: String,
}

/// Loads a headed CSV file. Row ids follow file order (0-based data rows).
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let (data, _) = load_csv_reader(file, schema, Provenance::File(path.display().to_string()))?;
    Ok(data)
}

/// Like [`load_csv`] but over any reader, also returning the rows dropped
/// under `allow_drop`.
pub fn load_csv_reader<R: Read>(
    reader: R,
    schema: &CsvSchema,
    source: Provenance,
) -> Result<(Dataset, Vec<RejectedRow>)> {
    crate::eval::note_io();
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let label_idx = headers
        .iter()
        .position(|h| *h == schema.label_column)
        .ok_or_else(|| Error::data(format!("missing label column `{}`", schema.label_column)))?;
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|&i| i != label_idx && !schema.skip_columns.contains(&headers[i]))
        .collect();
    if feature_cols.is_empty() {
        return Err(Error::data("no feature columns"));
    }

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut row_ids = Vec::new();
    let mut rejected = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut row = 0usize;
    let mut buf = Vec::with_capacity(feature_cols.len());
    while rdr.read_record(&mut record)? {
        let this_row = row;
        row += 1;
        let Some(label) = schema.rule.apply(record.get(label_idx).unwrap_or("")) else {
            continue;
        };
        buf.clear();
        let mut bad = None;
        for &c in &feature_cols {
            let cell = record.get(c).unwrap_or("").trim();
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => buf.push(v),
                Ok(_) => {
                    bad = Some((c, "non-finite value"));
                    break;
                }
                Err(_) if cell.is_empty() => {
                    bad = Some((c, "missing value"));
                    break;
                }
                Err(_) => {
                    bad = Some((c, "non-numeric value"));
                    break;
                }
            }
        }
        if let Some((c, reason)) = bad {
            let reject = RejectedRow {
                row: this_row,
                column: headers[c].clone(),
                reason: reason.to_string(),
            };
            if !schema.allow_drop {
                return Err(Error::Cell {
                    row: reject.row,
                    column: reject.column,
                    reason: reject.reason,
                });
            }
            rejected.push(reject);
            continue;
        }
        features.extend_from_slice(&buf);
        labels.push(label);
        row_ids.push(this_row as u64);
    }
    if labels.is_empty() {
        return Err(Error::data("no data rows"));
    }
    let names = feature_cols.iter().map(|&c| headers[c].clone()).collect();
    let data = Dataset::with_row_ids(features, feature_cols.len(), labels, row_ids, source)?
        .with_feature_names(names)?;
    Ok((data, rejected))
}

/// Writes the canonical layout: feature columns then `label` as 0/1.
pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    write_csv_writer(data, file)
}

pub fn write_csv_writer<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = data.feature_names().iter().map(String::as_str).collect();
    header.push("label");
    w.write_record(&header)?;
    let mut cells = Vec::with_capacity(data.n_features() + 1);
    for (i, row) in data.rows().enumerate() {
        cells.clear();
        cells.extend(row.iter().map(|v| v.to_string()));
        cells.push(data.label(i).index().to_string());
        w.write_record(&cells)?;
    }
    w.flush()?;
    Ok(())
}
