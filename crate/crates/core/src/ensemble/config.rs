use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bagging,
    GradientBoosting,
    AdaBoost,
}

impl Method {
    pub(crate) fn code(self) -> u8 {
        match self {
            Method::Bagging => 0,
            Method::GradientBoosting => 1,
            Method::AdaBoost => 2,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Method> {
        match c {
            0 => Some(Method::Bagging),
            1 => Some(Method::GradientBoosting),
            2 => Some(Method::AdaBoost),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Bagging => "bagging",
            Method::GradientBoosting => "gboost",
            Method::AdaBoost => "adaboost",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bagging" | "rf" | "random_forest" => Ok(Method::Bagging),
            "gboost" | "gbdt" | "gradient_boosting" | "gbt" => Ok(Method::GradientBoosting),
            "adaboost" | "ada" => Ok(Method::AdaBoost),
            other => Err(Error::config(format!("unknown method `{other}`"))),
        }
    }
}

/// Size and training knobs of one ensemble: `C(n_trees, max_depth)` plus the
/// learner-specific settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub method: Method,
    pub n_trees: usize,
    /// `None` is unlimited, bagging only.
    pub max_depth: Option<usize>,
    /// Shrinkage applied to each boosting stage.
    pub learning_rate: f64,
    /// Fraction of features tried at each split (bagging only).
    /// `None` uses `sqrt(n_features) / n_features`.
    pub feature_subsample: Option<f64>,
    pub min_samples_leaf: usize,
    pub seed: u64,
    /// Bootstrap resampling for bagging. Turning it off gives every tree the
    /// full training set.
    pub bootstrap: bool,
}

impl EnsembleConfig {
    pub const DEFAULT_LEARNING_RATE: f64 = 0.1;

    pub fn new(method: Method, n_trees: usize, max_depth: Option<usize>) -> Self {
        EnsembleConfig {
            method,
            n_trees,
            max_depth,
            learning_rate: Self::DEFAULT_LEARNING_RATE,
            feature_subsample: None,
            min_samples_leaf: 1,
            seed: 0,
            bootstrap: true,
        }
    }

    pub fn bagging(n_trees: usize, max_depth: Option<usize>) -> Self {
        Self::new(Method::Bagging, n_trees, max_depth)
    }

    pub fn gradient_boosting(n_trees: usize, max_depth: usize) -> Self {
        Self::new(Method::GradientBoosting, n_trees, Some(max_depth))
    }

    pub fn adaboost(n_trees: usize, max_depth: usize) -> Self {
        Self::new(Method::AdaBoost, n_trees, Some(max_depth))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_learning_rate(mut self, lr: f64) -> Self {
        self.learning_rate = lr;
        self
    }

    pub fn with_feature_subsample(mut self, fraction: f64) -> Self {
        self.feature_subsample = Some(fraction);
        self
    }

    pub fn with_min_samples_leaf(mut self, n: usize) -> Self {
        self.min_samples_leaf = n;
        self
    }

    pub fn with_bootstrap(mut self, on: bool) -> Self {
        self.bootstrap = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::config("n_trees must be positive"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::config("max_depth must be positive"));
        }
        if self.max_depth.is_none() && self.method != Method::Bagging {
            return Err(Error::config(format!(
                "{} needs a finite max_depth",
                self.method
            )));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::config("min_samples_leaf must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("learning_rate must be finite and > 0"));
        }
        if let Some(f) = self.feature_subsample {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::config("feature_subsample must be in (0, 1]"));
            }
        }
        Ok(())
    }

    /// Fraction of features to try per split for a given feature count.
    pub(crate) fn resolved_feature_fraction(&self, n_features: usize) -> f64 {
        match self.method {
            Method::Bagging => self
                .feature_subsample
                .unwrap_or_else(|| (n_features as f64).sqrt() / n_features as f64),
            _ => 1.0,
        }
    }

    /// Parses `C(T,D)` where `D` is a positive integer or `None`.
    pub fn parse_literal(s: &str, method: Method) -> Result<Self> {
        let (t, d) = parse_size_literal(s)?;
        let cfg = EnsembleConfig::new(method, t, d);
        cfg.validate()?;
        Ok(cfg)
    }

    /// `C(T,D)` form of the size settings.
    pub fn literal(&self) -> String {
        match self.max_depth {
            Some(d) => format!("C({},{})", self.n_trees, d),
            None => format!("C({},None)", self.n_trees),
        }
    }
}

impl fmt::Display for EnsembleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.method, self.literal())
    }
}

pub(crate) fn parse_size_literal(s: &str) -> Result<(usize, Option<usize>)> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact
        .strip_prefix("C(")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::config(format!("expected C(T,D), got `{s}`")))?;
    let (t, d) = inner
        .split_once(',')
        .ok_or_else(|| Error::config(format!("expected C(T,D), got `{s}`")))?;
    let t: usize = t
        .parse()
        .map_err(|_| Error::config(format!("bad tree count `{t}` in `{s}`")))?;
    let d = match d {
        "None" | "none" => None,
        d => Some(
            d.parse::<usize>()
                .map_err(|_| Error::config(format!("bad depth `{d}` in `{s}`")))?,
        ),
    };
    Ok((t, d))
}
