//! Deterministic numeric substrate: dense matrices, seeded random streams,
//! MLP forward/backward with hand-derived gradients, Adam, and k-means.
//!
//! Everything here has value semantics: operations are pure functions of
//! their inputs, and a fixed `(seed, stream label, operation sequence)`
//! reproduces bit-identical results in single-threaded use. Parallel callers
//! must derive independent [`SeededRng`] streams.

mod adam;
mod kmeans;
mod matrix;
mod mlp;
mod rng;

pub use adam::{adam_step, AdamHyper, AdamState};
pub use kmeans::{kmeans, KmeansResult};
pub use matrix::Matrix;
pub use mlp::{
    init_mlp_params, mlp_backward, mlp_forward, ForwardCache, HiddenActivation, MlpGrads,
    MlpParams, MlpSpec, OutputActivation,
};
pub use rng::SeededRng;

/// Errors raised by the numeric kernel.
#[derive(Debug, thiserror::Error)]
pub enum KernelError {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    Dimension {
        context: String,
        expected: String,
        got: String,
    },
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("training divergence: {0}")]
    Divergence(String),
    #[error("non-finite value produced in {0}")]
    NonFinite(String),
}

impl KernelError {
    pub(crate) fn dimension(
        context: impl Into<String>,
        expected: impl Into<String>,
        got: impl Into<String>,
    ) -> Self {
        KernelError::Dimension {
            context: context.into(),
            expected: expected.into(),
            got: got.into(),
        }
    }
}
