//! Anomaly detectors behind one pluggable interface.
//!
//! [`DaeDetector`] is a deep autoencoder trained on the latent-regulated
//! objective `|x - x_hat|^2 + lambda * |z - c|^2`. With `lambda == 0` it is a
//! standard DAE; with `lambda > 0` the latent codes of training data are
//! pulled toward a center `c` that can be frozen at zero, recomputed as the
//! latent mean each epoch, or learned jointly with the network. The same
//! full objective value is the anomaly score.
//!
//! [`DuadDetector`] wraps the autoencoder in periodic cluster-based
//! re-selection of the training set: after every reselection period the full
//! training set is encoded, clustered, and only rows in low-dispersion
//! clusters are retained for further training.

mod checkpoint;
mod dae;
mod duad;

pub use dae::{
    dae_batch_loss, dae_loss, dae_loss_grads, fit_dae, CenterMode, CenterParam, DaeConfig,
    DaeDetector, DaeGrads, DaeParams, LossBreakdown,
};
pub use duad::{
    cluster_dispersions, fit_duad, select_low_dispersion_rows, DuadConfig, DuadDetector,
    SelectionSpace,
};

use crate::numkernel::{KernelError, Matrix, SeededRng};
use crate::Real;

/// Errors raised by detector construction, fitting, and scoring.
#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("invalid detector configuration: {0}")]
    Config(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("training diverged at epoch {epoch}: {message}")]
    Divergence { epoch: usize, message: String },
    #[error("detector has not been fitted")]
    NotFitted,
    #[error("training-subset selection failed: {0}")]
    Selection(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

/// An unsupervised anomaly detector: fit on (presumed) normal data, then
/// score batches, higher meaning more anomalous.
///
/// After a successful `fit` the detector is immutable from the caller's
/// perspective and `score` is a deterministic per-row function, so a fitted
/// detector may be scored from many threads.
pub trait Detector<T: Real>: Send {
    fn fit(&mut self, train: &Matrix<T>, rng: &mut SeededRng) -> Result<(), ModelError>;
    fn score(&self, batch: &Matrix<T>) -> Result<Vec<T>, ModelError>;
}
