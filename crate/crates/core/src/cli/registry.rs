use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{load_csv_reader, write_csv, AdapterKind, CsvSchema, Dataset, Manifest};
use crate::{Error, Result};

pub const REGISTRY_FILE: &str = "registry.json";

/// Prepared datasets in a data directory, keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub datasets: BTreeMap<String, RegistryEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub adapter: AdapterKind,
    /// Raw file the entry was built from.
    pub source: String,
    pub sha256: String,
    /// Canonical CSV, relative to the data directory.
    pub csv: String,
    pub rows: usize,
    pub anomalies: usize,
    pub anomaly_rate: f64,
    pub normal_anomaly_ratio: Option<f64>,
}

/// What `prepare` did with one manifest entry.
#[derive(Debug, Clone, PartialEq)]
pub enum PrepareOutcome {
    Cached,
    Built,
}

impl Registry {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(REGISTRY_FILE);
        if !path.exists() {
            return Ok(Registry::default());
        }
        let text = std::fs::read_to_string(&path)?;
        serde_json::from_str(&text).map_err(|e| Error::data(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(dir.join(REGISTRY_FILE), text)?;
        Ok(())
    }

    /// Loads the canonical CSV of a prepared dataset.
    pub fn load_dataset(dir: &Path, name: &str) -> Result<Dataset> {
        let reg = Registry::load(dir)?;
        let entry = reg.datasets.get(name).ok_or_else(|| {
            Error::data(format!(
                "`{name}` is neither a file nor a prepared dataset in {} (run `prepare` first)",
                dir.display()
            ))
        })?;
        let csv = dir.join(&entry.csv);
        let (data, _) = load_csv_reader(
            File::open(&csv)?,
            &CsvSchema::canonical(),
            entry.adapter.provenance(Path::new(&entry.source)),
        )?;
        Ok(data)
    }

    /// Verifies and adapts every manifest entry into `dir`. Entries whose
    /// digest and CSV are already present are left alone.
    pub fn prepare(
        manifest: &Manifest,
        dir: &Path,
        mut report: impl FnMut(&str, &RegistryEntry, PrepareOutcome),
    ) -> Result<Registry> {
        std::fs::create_dir_all(dir)?;
        let mut reg = Registry::load(dir)?;
        for entry in &manifest.datasets {
            let raw = manifest.resolve(entry);
            if !raw.exists() {
                return Err(Error::data(format!(
                    "{}: raw file {} not found",
                    entry.name,
                    raw.display()
                )));
            }
            let sha = entry.verify(&raw)?;
            if let Some(prev) = reg.datasets.get(&entry.name) {
                if prev.sha256 == sha && prev.adapter == entry.adapter && dir.join(&prev.csv).exists() {
                    report(&entry.name, prev, PrepareOutcome::Cached);
                    continue;
                }
            }
            let data = entry.adapter.load(&raw)?;
            let csv = format!("{}.csv", entry.name);
            write_csv(&data, dir.join(&csv))?;
            let [_, anomalies] = data.class_counts();
            let built = RegistryEntry {
                adapter: entry.adapter,
                source: raw.display().to_string(),
                sha256: sha,
                csv,
                rows: data.n_rows(),
                anomalies,
                anomaly_rate: data.anomaly_rate(),
                normal_anomaly_ratio: data.normal_anomaly_ratio(),
            };
            report(&entry.name, &built, PrepareOutcome::Built);
            reg.datasets.insert(entry.name.clone(), built);
        }
        reg.save(dir)?;
        Ok(reg)
    }
}
