//! Decision-tree ensembles and a confidence-gated cascade for binary anomaly
//! detection.
//!
//! The crate is organised bottom-up:
//!
//! - [`data`]: datasets, CSV ingestion, the KDD / credit-card / forest-cover
//!   adapters, subsampling and a synthetic generator.
//! - [`ensemble`]: from-scratch CART trees plus bagging, gradient boosting and
//!   AdaBoost, with a canonical binary serialization.
//! - [`cascade`]: a small coarse model that answers confident queries on its own
//!   and routes the rest to one of two expert models.
//! - [`eval`]: per-class F1, stratified k-fold, cross-validated reports and
//!   single-query latency measurement.
//! - [`cli`]: the experiment runner behind the `cascade-forest` binary.
//!
//! ```
//! use cascade_forest::prelude::*;
//!
//! let data = make_synthetic(600, 4, 0.05, 4.0, 7).unwrap();
//! let coarse = EnsembleConfig::bagging(5, Some(4)).with_seed(1);
//! let expert = EnsembleConfig::bagging(9, Some(8)).with_seed(2);
//! let config = CascadeConfig::new(coarse, expert, 0.9, 0.95).unwrap();
//! let model = CascadeModel::train(&data, &config).unwrap();
//! let result = model.classify(data.row(0)).unwrap();
//! assert!(result.confidence >= 0.5);
//! ```

pub mod cascade;
pub mod cli;
pub mod data;
pub mod ensemble;
mod error;
pub mod eval;
mod wire;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::cascade::{
        classify_with, route_classification, route_training_instance, CascadeConfig,
        CascadeModel, ClassificationResult, ExpertSet, Path, RoutingStats,
    };
    pub use crate::data::{make_synthetic, subsample, Dataset, Label, Provenance};
    pub use crate::ensemble::{
        fit_tree, DistributionVector, EnsembleConfig, EnsembleModel, Method, Predictor,
        TreeParams,
    };
    pub use crate::eval::{per_class_f1, stratified_kfold, ClassF1, EvalOptions, EvalReport};
    pub use crate::{Error, Result};
}
