//! Dataset ingestion and preprocessing.
//!
//! Flow-feature CSVs are described by a [`FeatureSchema`] (which columns are
//! continuous, categorical, the label, or ignored, and which label strings
//! mean attack vs. benign), loaded into a [`RawTable`], and encoded into an
//! [`EncodedDataset`] by a [`PreprocessorState`] fit on training-side rows
//! only: min-max scaling for continuous columns, first-appearance one-hot
//! vocabularies for categorical ones.

mod cache;
mod preprocess;
mod schema;
mod stats;
mod table;
mod toy;

pub use cache::{load_dataset_cache, save_dataset_cache};
pub use preprocess::{
    apply_preprocessor, extract_labels, fit_preprocessor, EncodedDataset, PreprocessorState,
};
pub use schema::{ColumnKind, ColumnSpec, FeatureSchema};
pub use stats::{dataset_stats, DatasetStats};
pub use table::{load_csv, RawTable};
pub use toy::make_toy2d;

/// Errors raised by ingestion and preprocessing.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error at data row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("ragged row {row}: expected {expected} cells, got {got}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("cannot parse {value:?} as a number (row {row}, column {column:?})")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },
    #[error("label {value:?} (row {row}) is in neither the attack nor the benign set")]
    UnknownLabel { row: usize, value: String },
    #[error("dataset is empty")]
    Empty,
    #[error("cache format error: {0}")]
    Cache(String),
}
