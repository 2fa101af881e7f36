//! CART trees and the three ensemble learners.
//!
//! Every learner produces an [`EnsembleModel`]; every model answers with a
//! two-class [`DistributionVector`].

mod adaboost;
mod bagging;
mod boosting;
mod config;
mod model;
mod serialize;
mod tree;

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::Result;

pub use adaboost::{fit_adaboost, fit_adaboost_traced, ADABOOST_MAX_STAGE_WEIGHT};
pub use bagging::fit_bagging;
pub use boosting::{fit_gradient_boosting, fit_gradient_boosting_traced, log_loss};
pub use config::{EnsembleConfig, Method};
pub use model::{EnsembleModel, ModelSize};
pub use tree::{fit_tree, Tree, TreeNode, TreeParams};
pub(crate) use serialize::{read_config, write_config};

#[doc(hidden)]
pub mod hooks {
    //! Entry points that skip config validation, for degenerate-case tests.
    pub use super::boosting::fit_gradient_boosting_unchecked;
}

/// Two-class probability vector `(Normal, Anomaly)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionVector {
    pub p_normal: f64,
    pub p_anomaly: f64,
}

impl DistributionVector {
    pub const CERTAIN_NORMAL: DistributionVector = DistributionVector {
        p_normal: 1.0,
        p_anomaly: 0.0,
    };
    pub const CERTAIN_ANOMALY: DistributionVector = DistributionVector {
        p_normal: 0.0,
        p_anomaly: 1.0,
    };

    /// Builds a vector from the normal-class probability.
    pub fn from_normal(p_normal: f64) -> Self {
        let p_normal = p_normal.clamp(0.0, 1.0);
        DistributionVector {
            p_normal,
            p_anomaly: 1.0 - p_normal,
        }
    }

    pub fn from_anomaly(p_anomaly: f64) -> Self {
        let p_anomaly = p_anomaly.clamp(0.0, 1.0);
        DistributionVector {
            p_normal: 1.0 - p_anomaly,
            p_anomaly,
        }
    }

    pub fn certain(label: Label) -> Self {
        match label {
            Label::Normal => Self::CERTAIN_NORMAL,
            Label::Anomaly => Self::CERTAIN_ANOMALY,
        }
    }

    pub fn get(&self, label: Label) -> f64 {
        match label {
            Label::Normal => self.p_normal,
            Label::Anomaly => self.p_anomaly,
        }
    }

    /// Top-1 class. An exact tie goes to `Anomaly`.
    #[inline]
    pub fn argmax(&self) -> Label {
        if self.p_normal > self.p_anomaly {
            Label::Normal
        } else {
            Label::Anomaly
        }
    }

    /// Top-1 probability.
    #[inline]
    pub fn confidence(&self) -> f64 {
        self.p_normal.max(self.p_anomaly)
    }

    pub fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.p_normal)
            && (0.0..=1.0).contains(&self.p_anomaly)
            && (self.p_normal + self.p_anomaly - 1.0).abs() <= 1e-9
    }
}

/// Anything that maps a feature vector to a class distribution.
pub trait Predictor: Sync {
    fn n_features(&self) -> usize;

    fn predict_proba(&self, x: &[f64]) -> Result<DistributionVector>;

    fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(self.predict_proba(x)?.argmax())
    }
}

impl<P: Predictor + ?Sized> Predictor for &P {
    fn n_features(&self) -> usize {
        (**self).n_features()
    }

    fn predict_proba(&self, x: &[f64]) -> Result<DistributionVector> {
        (**self).predict_proba(x)
    }
}
