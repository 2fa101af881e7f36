use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cascade::Path;
use crate::ensemble::{EnsembleConfig, Method};
use crate::{Error, Result};

/// A full cascade setting, written `R(C(T,D), C(T,D), cct, tct)`.
///
/// `cct` gates classification: a coarse answer at or above it is final.
/// `tct` gates training: rows the coarse model scores below it feed the
/// experts. The constructor enforces `0.5 <= cct <= tct <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeConfig {
    pub coarse: EnsembleConfig,
    /// Shared by both experts unless `expert2` overrides it.
    pub expert: EnsembleConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expert2: Option<EnsembleConfig>,
    pub(crate) cct: f64,
    pub(crate) tct: f64,
}

impl CascadeConfig {
    pub fn new(coarse: EnsembleConfig, expert: EnsembleConfig, cct: f64, tct: f64) -> Result<Self> {
        check_thresholds(cct, tct)?;
        coarse.validate()?;
        expert.validate()?;
        Ok(CascadeConfig {
            coarse,
            expert,
            expert2: None,
            cct,
            tct,
        })
    }

    /// Gives the second expert its own settings.
    pub fn with_expert2(mut self, config: EnsembleConfig) -> Result<Self> {
        config.validate()?;
        self.expert2 = Some(config);
        Ok(self)
    }

    /// Sets the seed of every member model.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.coarse.seed = seed;
        self.expert.seed = seed;
        if let Some(e) = &mut self.expert2 {
            e.seed = seed;
        }
        self
    }

    /// Same models, different thresholds.
    pub fn with_thresholds(&self, cct: f64, tct: f64) -> Result<Self> {
        check_thresholds(cct, tct)?;
        Ok(CascadeConfig {
            cct,
            tct,
            ..self.clone()
        })
    }

    pub fn cct(&self) -> f64 {
        self.cct
    }

    pub fn tct(&self) -> f64 {
        self.tct
    }

    pub fn expert_config(&self, path: Path) -> &EnsembleConfig {
        match (path, &self.expert2) {
            (Path::Expert2, Some(e)) => e,
            _ => &self.expert,
        }
    }

    /// Parses `R(C(T,D),C(T,D),cct,tct)`; both members use `method`.
    pub fn parse_literal(s: &str, method: Method) -> Result<Self> {
        CascadeLiteral::parse(s, method)?.into_config()
    }

    pub fn literal(&self) -> String {
        format!(
            "R({},{},{},{})",
            self.coarse.literal(),
            self.expert.literal(),
            self.cct,
            self.tct
        )
    }

    pub(crate) fn check(&self) -> Result<()> {
        check_thresholds(self.cct, self.tct)?;
        self.coarse.validate()?;
        self.expert.validate()?;
        if let Some(e) = &self.expert2 {
            e.validate()?;
        }
        Ok(())
    }
}

impl fmt::Display for CascadeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.coarse.method, self.literal())
    }
}

fn check_thresholds(cct: f64, tct: f64) -> Result<()> {
    let ok = |t: f64| (0.5..=1.0).contains(&t);
    if !ok(cct) || !ok(tct) {
        return Err(Error::config(format!(
            "thresholds must lie in [0.5, 1], got cct={cct} tct={tct}"
        )));
    }
    if tct < cct {
        return Err(Error::config(format!("tct ({tct}) must be >= cct ({cct})")));
    }
    Ok(())
}

/// A parsed `R(...)` literal whose thresholds may be left open with `-`,
/// for sweeps that fill them in.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeLiteral {
    pub coarse: EnsembleConfig,
    pub expert: EnsembleConfig,
    pub cct: Option<f64>,
    pub tct: Option<f64>,
}

impl CascadeLiteral {
    pub fn parse(s: &str, method: Method) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::config(format!("expected R(C(T,D),C(T,D),cct,tct), got `{s}`"));
        let inner = compact
            .strip_prefix("R(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let parts = split_top_level(inner);
        if parts.len() != 4 {
            return Err(bad());
        }
        let coarse = EnsembleConfig::parse_literal(parts[0], method)?;
        let expert = EnsembleConfig::parse_literal(parts[1], method)?;
        let threshold = |p: &str| -> Result<Option<f64>> {
            if p == "-" {
                return Ok(None);
            }
            p.parse::<f64>()
                .map(Some)
                .map_err(|_| Error::config(format!("bad threshold `{p}` in `{s}`")))
        };
        Ok(CascadeLiteral {
            coarse,
            expert,
            cct: threshold(parts[2])?,
            tct: threshold(parts[3])?,
        })
    }

    pub fn into_config(self) -> Result<CascadeConfig> {
        match (self.cct, self.tct) {
            (Some(cct), Some(tct)) => CascadeConfig::new(self.coarse, self.expert, cct, tct),
            _ => Err(Error::config("cascade literal leaves a threshold open")),
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}
