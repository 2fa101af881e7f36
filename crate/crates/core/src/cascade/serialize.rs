//! Cascade container.
//!
//! ```text
//! "CFCS"  version:u16
//! thresholds:  cct:f64 tct:f64
//! configs:     coarse, expert, has_expert2:u8 [expert2]   (ensemble config blocks)
//! stats:       n_train_rows:u64 fg1_fraction:f64 fg2_fraction:f64
//!              has_ratio1:u8 ratio1:f64 has_ratio2:u8 ratio2:f64 duplicated:u64
//! models:      coarse  len:u64 CFEM bytes
//!              expert1 kind:u8 (0 echo, 1 trained) [len:u64 CFEM bytes]
//!              expert2 same
//! ```

use crate::cascade::{CascadeConfig, CascadeModel, Expert, RoutingStats};
use crate::ensemble::{read_config, write_config, EnsembleModel, Predictor};
use crate::wire::{Reader, Writer};
use crate::{Error, Result};

pub const CASCADE_MAGIC: &[u8; 4] = b"CFCS";
pub const CASCADE_VERSION: u16 = 1;

impl CascadeModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.bytes(CASCADE_MAGIC);
        w.u16(CASCADE_VERSION);
        let c = &self.config;
        w.f64(c.cct());
        w.f64(c.tct());
        write_config(&mut w, &c.coarse);
        write_config(&mut w, &c.expert);
        match &c.expert2 {
            Some(e) => {
                w.u8(1);
                write_config(&mut w, e);
            }
            None => w.u8(0),
        }
        let s = &self.training_stats;
        w.u64(s.n_train_rows as u64);
        w.f64(s.fg1_train_fraction);
        w.f64(s.fg2_train_fraction);
        for r in [s.fg1_ratio, s.fg2_ratio] {
            w.u8(r.is_some() as u8);
            w.f64(r.unwrap_or(0.0));
        }
        w.u64(s.duplicated_anomaly_count as u64);
        write_blob(&mut w, &self.coarse);
        for e in [&self.expert1, &self.expert2] {
            match e {
                Expert::Echo => w.u8(0),
                Expert::Trained(m) => {
                    w.u8(1);
                    write_blob(&mut w, m);
                }
            }
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        crate::eval::note_io();
        let mut r = Reader::new(bytes);
        if r.take(4)? != CASCADE_MAGIC {
            return Err(Error::Format("not a cascade container".into()));
        }
        let version = r.u16()?;
        if version != CASCADE_VERSION {
            return Err(Error::Format(format!("unsupported cascade version {version}")));
        }
        let cct = r.f64()?;
        let tct = r.f64()?;
        let coarse_cfg = read_config(&mut r)?;
        let expert_cfg = read_config(&mut r)?;
        let expert2 = match r.u8()? {
            0 => None,
            1 => Some(read_config(&mut r)?),
            f => return Err(Error::Format(format!("bad expert2 flag {f}"))),
        };
        let config = CascadeConfig::new(coarse_cfg, expert_cfg, cct, tct)
            .map_err(|e| Error::Format(e.to_string()))?;
        let config = CascadeConfig { expert2, ..config };
        let n_train_rows = r.u64()? as usize;
        let fg1_train_fraction = r.f64()?;
        let fg2_train_fraction = r.f64()?;
        let mut ratios = [None, None];
        for slot in &mut ratios {
            let present = r.u8()?;
            let v = r.f64()?;
            *slot = match present {
                0 => None,
                1 => Some(v),
                f => return Err(Error::Format(format!("bad ratio flag {f}"))),
            };
        }
        let duplicated_anomaly_count = r.u64()? as usize;
        let coarse = read_blob(&mut r)?;
        let mut experts = Vec::with_capacity(2);
        for _ in 0..2 {
            experts.push(match r.u8()? {
                0 => Expert::Echo,
                1 => Expert::Trained(read_blob(&mut r)?),
                k => return Err(Error::Format(format!("bad expert kind {k}"))),
            });
        }
        r.expect_end()?;
        let expert2 = experts.pop().unwrap();
        let expert1 = experts.pop().unwrap();
        let model = CascadeModel {
            config,
            coarse,
            expert1,
            expert2,
            training_stats: RoutingStats {
                n_train_rows,
                fg1_train_fraction,
                fg2_train_fraction,
                fg1_ratio: ratios[0],
                fg2_ratio: ratios[1],
                duplicated_anomaly_count,
            },
        };
        model.check()?;
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: CascadeModel = serde_json::from_str(s)?;
        m.config.check().map_err(|e| Error::Format(e.to_string()))?;
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        let n = self.coarse.n_features();
        for e in [&self.expert1, &self.expert2] {
            if let Expert::Trained(m) = e {
                if m.n_features() != n {
                    return Err(Error::Format("expert and coarse feature counts differ".into()));
                }
            }
        }
        Ok(())
    }
}

fn write_blob(w: &mut Writer, m: &EnsembleModel) {
    let bytes = m.to_bytes();
    w.u64(bytes.len() as u64);
    w.bytes(&bytes);
}

fn read_blob(r: &mut Reader<'_>) -> Result<EnsembleModel> {
    let len = r.u64()?;
    let len = usize::try_from(len).map_err(|_| Error::Format("blob too large".into()))?;
    EnsembleModel::from_bytes(r.take(len)?)
}
