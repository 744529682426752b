//! Benchmark harness and detector library for studying how training-set
//! contamination degrades unsupervised network anomaly detectors.
//!
//! The crate is organized around six concerns:
//!
//! - [`numkernel`] — deterministic numeric substrate: dense matrices, seeded
//!   random streams, MLP forward/backward, Adam, k-means.
//! - [`models`] — the detectors: a deep autoencoder (DAE), its
//!   latent-regulated variant (DAE-LR) with a fixed, mean, or learnable
//!   latent center, and the DUAD cluster-selection retraining wrapper.
//! - [`dataio`] — CSV ingestion, schema-driven preprocessing (min-max +
//!   one-hot), dataset statistics, and a 2D synthetic data generator.
//! - [`protocol`] — the leakage-free evaluation protocol: splits,
//!   contamination injection, threshold estimation, metrics, ROC/AUC, and
//!   multi-seed sweeps.
//! - [`ranking`] — statistical model comparison: average ranks, pairwise
//!   Wilcoxon signed-rank tests with Holm correction, rank-biserial effect
//!   sizes, and critical-difference cliques.
//!
//! Numeric code is generic over the scalar type through the [`Real`] trait;
//! the harness itself runs everything in `f64`, and the type aliases at the
//! crate root pin that choice for downstream users.

pub mod dataio;
pub mod models;
pub mod numkernel;
pub mod protocol;
pub mod ranking;

mod real;

pub use real::Real;

/// Dense row-major `f64` matrix, the workhorse container of the harness.
pub type Matrix = numkernel::Matrix<f64>;
/// `f64` MLP parameters.
pub type MlpParams = numkernel::MlpParams<f64>;
/// `f64` Adam optimizer state.
pub type AdamState = numkernel::AdamState<f64>;
/// `f64` autoencoder configuration.
pub type DaeConfig = models::DaeConfig<f64>;
/// `f64` autoencoder detector (DAE when `lambda == 0`, DAE-LR otherwise).
pub type DaeDetector = models::DaeDetector<f64>;
/// `f64` DUAD configuration.
pub type DuadConfig = models::DuadConfig<f64>;
/// `f64` DUAD detector.
pub type DuadDetector = models::DuadDetector<f64>;
