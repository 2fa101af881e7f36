use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::AdapterKind;
use crate::{Error, Result};

/// Local dataset registry input: one entry per raw file.
///
/// ```toml
/// [[dataset]]
/// name = "ccf"
/// adapter = "ccf"
/// path = "raw/creditcard.csv"
/// sha256 = "…"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(rename = "dataset", default)]
    pub datasets: Vec<ManifestEntry>,
    /// Directory relative paths resolve against; not part of the file.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub adapter: AdapterKind,
    pub path: PathBuf,
    /// Expected hex digest of the raw file. Entries without one are loaded
    /// unverified and the computed digest is reported.
    #[serde(default)]
    pub sha256: Option<String>,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut m: Manifest =
            toml::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        m.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(m)
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.base_dir.join(&entry.path)
        }
    }
}

impl ManifestEntry {
    /// Hashes the file and compares against the recorded digest.
    /// Returns the computed digest.
    pub fn verify(&self, path: &Path) -> Result<String> {
        let actual = sha256_file(path)?;
        if let Some(expected) = &self.sha256 {
            if !expected.eq_ignore_ascii_case(&actual) {
                return Err(Error::Checksum {
                    path: path.to_path_buf(),
                    expected: expected.clone(),
                    actual,
                });
            }
        }
        Ok(actual)
    }
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}
