use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::ensemble::DistributionVector;

/// Which model produced the final answer for a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Path {
    /// The coarse model was confident enough.
    ShortPath,
    /// Coarse model leaned Normal; expert 1 decided.
    Expert1,
    /// Coarse model leaned Anomaly; expert 2 decided.
    Expert2,
}

impl Path {
    pub const ALL: [Path; 3] = [Path::ShortPath, Path::Expert1, Path::Expert2];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Expert training sets a row is copied into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExpertSet {
    pub expert1: bool,
    pub expert2: bool,
}

impl ExpertSet {
    pub const NONE: ExpertSet = ExpertSet {
        expert1: false,
        expert2: false,
    };
    pub const BOTH: ExpertSet = ExpertSet {
        expert1: true,
        expert2: true,
    };

    pub fn only(path: Path) -> ExpertSet {
        ExpertSet {
            expert1: path == Path::Expert1,
            expert2: path == Path::Expert2,
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.expert1 && !self.expert2
    }
}

/// Expert that handles a low-confidence coarse verdict.
#[inline]
fn expert_for(d: &DistributionVector) -> Path {
    match d.argmax() {
        Label::Normal => Path::Expert1,
        Label::Anomaly => Path::Expert2,
    }
}

/// Training-time routing of one row with coarse distribution `d`.
///
/// Confident rows (`max(d) >= tct`) train no expert. Below the threshold an
/// anomaly goes to both experts and a normal row goes to the expert matching
/// the coarse verdict.
#[inline]
pub fn route_training_instance(d: DistributionVector, label: Label, tct: f64) -> ExpertSet {
    if d.confidence() >= tct {
        ExpertSet::NONE
    } else if label == Label::Anomaly {
        ExpertSet::BOTH
    } else {
        ExpertSet::only(expert_for(&d))
    }
}

/// Classification-time routing of a query with coarse distribution `d`.
#[inline]
pub fn route_classification(d: DistributionVector, cct: f64) -> Path {
    if d.confidence() >= cct {
        Path::ShortPath
    } else {
        expert_for(&d)
    }
}
