//! Canonical model container.
//!
//! ```text
//! "CFEM"  version:u16
//! config:  method:u8 n_trees:u32 max_depth:u32 (0 = unlimited)
//!          learning_rate:f64 feature_subsample:f64 (-1 = sqrt rule)
//!          min_samples_leaf:u32 seed:u64 bootstrap:u8
//! model:   n_features:u32 base_score:f64 constant:u8 (0 none, 1 normal, 2 anomaly)
//! trees:   count:u32, then per tree  weight:f64 node_count:u32
//!          and preorder nodes  kind:u8 (0 leaf, 1 split) feature:u32
//!          threshold:f64 leaf:f64 f64 n_train:u64
//! ```
//!
//! All integers and floats are little-endian. A JSON mirror with the same
//! content is available through [`EnsembleModel::to_json`].

use crate::data::Label;
use crate::ensemble::{EnsembleConfig, EnsembleModel, Method, Tree, TreeNode};
use crate::wire::{Reader, Writer};
use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"CFEM";
pub const VERSION: u16 = 1;

const NO_FEATURE: u32 = u32::MAX;

impl EnsembleModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write_to(&mut w);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        crate::eval::note_io();
        let mut r = Reader::new(bytes);
        let m = Self::read_from(&mut r)?;
        r.expect_end()?;
        Ok(m)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: EnsembleModel = serde_json::from_str(s)?;
        m.check()?;
        Ok(m)
    }

    pub(crate) fn write_to(&self, w: &mut Writer) {
        w.bytes(MAGIC);
        w.u16(VERSION);
        write_config(w, &self.config);
        w.u32(self.n_features as u32);
        w.f64(self.base_score);
        w.u8(match self.constant {
            None => 0,
            Some(Label::Normal) => 1,
            Some(Label::Anomaly) => 2,
        });
        w.u32(self.trees.len() as u32);
        for (tree, weight) in self.trees.iter().zip(&self.tree_weights) {
            w.f64(*weight);
            w.u32(tree.node_count() as u32);
            for node in tree.nodes() {
                w.u8(node.split_feature.is_some() as u8);
                w.u32(node.split_feature.unwrap_or(NO_FEATURE));
                w.f64(node.split_threshold);
                w.f64(node.leaf_value[0]);
                w.f64(node.leaf_value[1]);
                w.u64(node.n_train);
            }
        }
    }

    pub(crate) fn read_from(r: &mut Reader<'_>) -> Result<Self> {
        if r.take(4)? != MAGIC {
            return Err(Error::Format("bad magic, not an ensemble model".into()));
        }
        let version = r.u16()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let config = read_config(r)?;
        let n_features = r.u32()? as usize;
        let base_score = r.f64()?;
        let constant = match r.u8()? {
            0 => None,
            1 => Some(Label::Normal),
            2 => Some(Label::Anomaly),
            c => return Err(Error::Format(format!("bad constant tag {c}"))),
        };
        let n_trees = r.u32()? as usize;
        let mut trees = Vec::with_capacity(n_trees.min(1 << 16));
        let mut tree_weights = Vec::with_capacity(n_trees.min(1 << 16));
        for _ in 0..n_trees {
            tree_weights.push(r.f64()?);
            let n_nodes = r.u32()? as usize;
            let mut nodes = Vec::with_capacity(n_nodes.min(1 << 20));
            for _ in 0..n_nodes {
                let kind = r.u8()?;
                let feature = r.u32()?;
                let threshold = r.f64()?;
                let leaf_value = [r.f64()?, r.f64()?];
                let n_train = r.u64()?;
                let split_feature = match kind {
                    0 if feature == NO_FEATURE => None,
                    1 if feature != NO_FEATURE => Some(feature),
                    _ => return Err(Error::Format(format!("bad node kind {kind}/{feature}"))),
                };
                nodes.push(TreeNode {
                    split_feature,
                    split_threshold: threshold,
                    left: 0,
                    right: 0,
                    leaf_value,
                    n_train,
                });
            }
            link_preorder(&mut nodes)?;
            trees.push(Tree::from_nodes(nodes)?);
        }
        let model = EnsembleModel {
            config,
            n_features,
            trees,
            tree_weights,
            base_score,
            constant,
        };
        model.check()?;
        Ok(model)
    }

    fn check(&self) -> Result<()> {
        if self.trees.len() != self.tree_weights.len() {
            return Err(Error::Format("tree and weight counts differ".into()));
        }
        if let Some(f) = self.trees.iter().filter_map(Tree::max_feature).max() {
            if f as usize >= self.n_features {
                return Err(Error::Format(format!(
                    "split on feature {f} of a {}-feature model",
                    self.n_features
                )));
            }
        }
        Ok(())
    }
}

/// Rebuilds child links of a preorder node list.
fn link_preorder(nodes: &mut [TreeNode]) -> Result<()> {
    fn walk(nodes: &mut [TreeNode], i: usize, depth: usize) -> Result<usize> {
        if i >= nodes.len() || depth > nodes.len() {
            return Err(Error::Format("truncated tree".into()));
        }
        if nodes[i].split_feature.is_none() {
            return Ok(i + 1);
        }
        let right = walk(nodes, i + 1, depth + 1)?;
        nodes[i].left = (i + 1) as u32;
        nodes[i].right = right as u32;
        walk(nodes, right, depth + 1)
    }
    if nodes.is_empty() {
        return Err(Error::Format("tree without nodes".into()));
    }
    let end = walk(nodes, 0, 0)?;
    if end != nodes.len() {
        return Err(Error::Format("extra nodes after tree".into()));
    }
    Ok(())
}

pub(crate) fn write_config(w: &mut Writer, c: &EnsembleConfig) {
    w.u8(c.method.code());
    w.u32(c.n_trees as u32);
    w.u32(c.max_depth.map_or(0, |d| d as u32));
    w.f64(c.learning_rate);
    w.f64(c.feature_subsample.unwrap_or(-1.0));
    w.u32(c.min_samples_leaf as u32);
    w.u64(c.seed);
    w.u8(c.bootstrap as u8);
}

pub(crate) fn read_config(r: &mut Reader<'_>) -> Result<EnsembleConfig> {
    let method = Method::from_code(r.u8()?).ok_or_else(|| Error::Format("bad method".into()))?;
    let n_trees = r.u32()? as usize;
    let max_depth = match r.u32()? {
        0 => None,
        d => Some(d as usize),
    };
    let learning_rate = r.f64()?;
    let fs = r.f64()?;
    let feature_subsample = if fs == -1.0 { None } else { Some(fs) };
    let min_samples_leaf = r.u32()? as usize;
    let seed = r.u64()?;
    let bootstrap = match r.u8()? {
        0 => false,
        1 => true,
        b => return Err(Error::Format(format!("bad bootstrap flag {b}"))),
    };
    Ok(EnsembleConfig {
        method,
        n_trees,
        max_depth,
        learning_rate,
        feature_subsample,
        min_samples_leaf,
        seed,
        bootstrap,
    })
}
