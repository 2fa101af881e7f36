use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::cascade::{threshold_lattice, CascadeConfig, CascadeLiteral};
use crate::cli::registry::Registry;
use crate::data::{
    load_csv, make_synthetic, subsample, AdapterKind, CsvSchema, Dataset, LabelRule,
};
use crate::ensemble::{EnsembleConfig, Method};
use crate::eval::{EvalOptions, LatencyOptions};
use crate::{Error, Result};

/// Settings shared by `train`, `eval`, `sweep` and `bench`. Every field can
/// come from `--config FILE` (TOML) or a flag; flags win.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// TOML file with any of these settings
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Dataset: a prepared name (kdd, ccf, fc), a file path, or
    /// synthetic:ROWS,FEATURES,ANOMALY_RATE,SEPARATION
    #[arg(long)]
    pub dataset: Option<String>,

    /// Adapter for a dataset path: kdd, ccf, fc or csv
    #[arg(long)]
    pub adapter: Option<String>,

    /// Label column for csv input (default `label`)
    #[arg(long)]
    pub label_column: Option<String>,

    /// Anomaly rule for csv input, e.g. `==1` or `!=normal`
    #[arg(long)]
    pub label_rule: Option<String>,

    /// Directory holding prepared datasets and registry.json
    #[arg(long)]
    pub data_dir: Option<PathBuf>,

    /// Learner: bagging, gboost or adaboost
    #[arg(long)]
    pub method: Option<String>,

    /// Baseline ensemble literal, e.g. C(150,None)
    #[arg(long)]
    pub baseline: Option<String>,

    /// Cascade literal, e.g. R(C(10,10),C(20,20),0.98,0.995)
    #[arg(long)]
    pub cascade: Option<String>,

    /// Boosting shrinkage
    #[arg(long)]
    pub learning_rate: Option<f64>,

    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long)]
    pub folds: Option<usize>,

    /// N or N,stratified
    #[arg(long)]
    pub subsample: Option<String>,

    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker threads (falls back to CF_THREADS)
    #[arg(long)]
    pub threads: Option<usize>,

    /// Untimed queries before latency measurement
    #[arg(long)]
    pub warmup: Option<usize>,

    /// Timed single-query calls per measurement
    #[arg(long)]
    pub repetitions: Option<usize>,

    /// Comma-separated sweep thresholds
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,

    /// Sweep threshold step over [0.5, 1]
    #[arg(long)]
    pub step: Option<f64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    /// Reads `--config` if given and lays the flags over it.
    pub fn resolve(self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        let mut base = Self::from_toml(&text)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        let top = self;
        overlay!(
            base, top, config, dataset, adapter, label_column, label_rule, data_dir, method,
            baseline, cascade, learning_rate, seed, folds, subsample, out, threads, warmup,
            repetitions, thresholds, step
        );
        Ok(base)
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::config("a seed is required (--seed or `seed` in the config)"))
    }

    pub fn method(&self) -> Result<Method> {
        self.method.as_deref().map_or(Ok(Method::Bagging), Method::from_str)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn data_dir(&self) -> PathBuf {
        self.data_dir
            .clone()
            .or_else(|| std::env::var_os("CF_DATA_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("data"))
    }

    pub fn threads(&self) -> Result<Option<usize>> {
        if let Some(n) = self.threads {
            return Ok(Some(n));
        }
        match std::env::var("CF_THREADS") {
            Ok(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| Error::config(format!("CF_THREADS is not a number: `{v}`"))),
            Err(_) => Ok(None),
        }
    }

    pub fn baseline_config(&self) -> Result<Option<EnsembleConfig>> {
        let Some(lit) = &self.baseline else {
            return Ok(None);
        };
        let cfg = self.tune(EnsembleConfig::parse_literal(lit, self.method()?)?)?;
        Ok(Some(cfg))
    }

    pub fn cascade_config(&self) -> Result<Option<CascadeConfig>> {
        let Some(lit) = &self.cascade else {
            return Ok(None);
        };
        let cfg = CascadeConfig::parse_literal(lit, self.method()?)?;
        let tuned = CascadeConfig::new(
            self.tune(cfg.coarse.clone())?,
            self.tune(cfg.expert.clone())?,
            cfg.cct(),
            cfg.tct(),
        )?;
        Ok(Some(tuned))
    }

    /// Cascade literal whose thresholds may be `-`.
    pub fn cascade_template(&self) -> Result<Option<(EnsembleConfig, EnsembleConfig)>> {
        let Some(lit) = &self.cascade else {
            return Ok(None);
        };
        let l = CascadeLiteral::parse(lit, self.method()?)?;
        Ok(Some((self.tune(l.coarse)?, self.tune(l.expert)?)))
    }

    fn tune(&self, mut cfg: EnsembleConfig) -> Result<EnsembleConfig> {
        cfg.seed = self.seed()?;
        if let Some(lr) = self.learning_rate {
            cfg.learning_rate = lr;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn eval_options(&self) -> Result<EvalOptions> {
        let d = LatencyOptions::default();
        Ok(EvalOptions {
            folds: self.folds.unwrap_or(5),
            seed: self.seed()?,
            latency: LatencyOptions {
                warmup: self.warmup.unwrap_or(d.warmup),
                repetitions: self.repetitions.unwrap_or(d.repetitions),
            },
        })
    }

    /// Explicit thresholds, else the lattice for `step` (default 0.05).
    pub fn sweep_thresholds(&self) -> Result<Vec<f64>> {
        match &self.thresholds {
            Some(t) if !t.is_empty() => Ok(t.clone()),
            _ => threshold_lattice(self.step.unwrap_or(0.05)),
        }
    }

    /// Loads and optionally subsamples the dataset.
    pub fn load_dataset(&self) -> Result<Dataset> {
        let spec = self
            .dataset
            .as_deref()
            .ok_or_else(|| Error::config("no dataset given (--dataset)"))?;
        let data = if let Some(params) = spec.strip_prefix("synthetic:") {
            synthetic(params, self.seed()?)?
        } else if Path::new(spec).exists() {
            let path = Path::new(spec);
            match self.adapter.as_deref().map(AdapterKind::from_str).transpose()? {
                Some(AdapterKind::Csv) | None => load_csv(path, &self.csv_schema()?)?,
                Some(kind) => kind.load(path)?,
            }
        } else {
            Registry::load_dataset(&self.data_dir(), spec)?
        };
        match self.subsample.as_deref() {
            Some(s) => {
                let (n, stratified) = parse_subsample(s)?;
                subsample(&data, n, stratified, self.seed()?)
            }
            None => Ok(data),
        }
    }

    fn csv_schema(&self) -> Result<CsvSchema> {
        let column = self.label_column.clone().unwrap_or_else(|| "label".into());
        let rule = match &self.label_rule {
            Some(r) => LabelRule::parse(r)?,
            None => LabelRule::Equals("1".into()),
        };
        Ok(CsvSchema::new(column, rule))
    }
}

fn synthetic(params: &str, seed: u64) -> Result<Dataset> {
    let parts: Vec<&str> = params.split(',').map(str::trim).collect();
    let bad = || Error::config(format!("expected synthetic:ROWS,FEATURES,RATE,SEPARATION, got `{params}`"));
    if parts.len() != 4 {
        return Err(bad());
    }
    let rows = parts[0].parse().map_err(|_| bad())?;
    let features = parts[1].parse().map_err(|_| bad())?;
    let rate = parts[2].parse().map_err(|_| bad())?;
    let sep = parts[3].parse().map_err(|_| bad())?;
    make_synthetic(rows, features, rate, sep, seed).map_err(|e| Error::config(e.to_string()))
}

/// `N` or `N,stratified`.
pub fn parse_subsample(s: &str) -> Result<(usize, bool)> {
    let mut parts = s.split(',').map(str::trim);
    let n = parts
        .next()
        .and_then(|n| n.parse::<usize>().ok())
        .ok_or_else(|| Error::config(format!("bad subsample `{s}`")))?;
    let stratified = match parts.next() {
        None => false,
        Some("stratified") => true,
        Some(other) => return Err(Error::config(format!("bad subsample option `{other}`"))),
    };
    if parts.next().is_some() {
        return Err(Error::config(format!("bad subsample `{s}`")));
    }
    Ok((n, stratified))
}
