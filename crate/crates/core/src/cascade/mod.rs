//! Confidence-gated cascade: a small coarse model answers the queries it is
//! sure about and hands the rest to one of two experts.
//!
//! Training routes every training row by the coarse model's confidence on
//! it. Rows below `tct` train an expert: normal rows go to the expert named
//! by the coarse verdict, anomalies go to both. Classification sends a query
//! below `cct` to expert 1 if the coarse model leaned Normal and expert 2
//! otherwise, and the expert's answer is final.

mod config;
mod grid;
mod model;
mod routing;
mod serialize;
mod sweep;

pub use config::{CascadeConfig, CascadeLiteral};
pub use grid::{grid_search, rank, GridEntry, ThresholdGrid};
pub use model::{
    classify_with, score_rows, train_cascade, CascadeModel, ClassificationResult, Expert,
    ExpertPartition, RoutingStats,
};
pub use routing::{route_classification, route_training_instance, ExpertSet, Path};
pub use serialize::{CASCADE_MAGIC, CASCADE_VERSION};
pub use sweep::{find_lowest_beating_cct, sweep_cct, sweep_scores, threshold_lattice, SweepPoint};
