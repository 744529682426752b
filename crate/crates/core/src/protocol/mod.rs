//! Leakage-free evaluation protocol.
//!
//! Each run draws four pairwise-disjoint subsets from one dataset: training
//! normals, an attacks-only contamination pool, a threshold set, and the
//! final test set. Preprocessing statistics are fit on training-side rows
//! only, the decision threshold is chosen on the threshold set alone, and
//! the final test set is never read before evaluation — so no information
//! can flow from held-out data into the model or its threshold. The label
//! composition of the threshold and final test sets does not depend on the
//! contamination ratio, which makes metrics comparable across ratios.

mod contaminate;
mod experiment;
mod metrics;
mod roc;
mod split;

pub use contaminate::{contaminate, contamination_count};
pub use experiment::{
    run_experiment, run_experiment_single_run, CellFailure, DataSource, ExperimentOutcome,
    MetricsRecord, SweepSpec,
};
pub use metrics::{compute_metrics, estimate_threshold, MetricTriple, ThresholdEstimate};
pub use roc::{roc_auc, RocCurve};
pub use split::{make_splits, ExperimentSplits, SplitSpec};

use crate::dataio::DataError;
use crate::models::ModelError;

/// Errors raised while running the protocol.
#[derive(Debug, thiserror::Error)]
pub enum ProtocolError {
    #[error("split error: {0}")]
    Split(String),
    #[error("contamination pool too small: need {required} attack rows, pool has {available}")]
    InsufficientPool { required: usize, available: usize },
    #[error("threshold estimation needs at least one positive label")]
    NoPositives,
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
