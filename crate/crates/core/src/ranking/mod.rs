//! Statistical model comparison.
//!
//! Models are ranked by mean F1 per `(dataset, alpha)` condition; pairwise
//! differences are tested with the exact Wilcoxon signed-rank test (normal
//! approximation with tie correction beyond n = 20), p-values are
//! Holm-adjusted, effect sizes are matched-pairs rank-biserial correlations,
//! and models whose adjusted p stays above the significance level group into
//! critical-difference cliques.

mod cliques;
mod holm;
mod ranks;
mod report;
mod wilcoxon;

pub use cliques::cd_groups;
pub use holm::holm_adjust;
pub use ranks::{average_ranks, Condition, ScoreTable};
pub use report::{build_rank_report, ModelRank, PairwiseResult, RankReport};
pub use wilcoxon::{effect_size, wilcoxon_signed_rank, WilcoxonOutcome};

/// Errors raised by ranking computations.
#[derive(Debug, thiserror::Error)]
pub enum RankError {
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("score table error: {0}")]
    Table(String),
}
