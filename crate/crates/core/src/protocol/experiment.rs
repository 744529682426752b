use serde::{Deserialize, Serialize};

use super::{
    contaminate, estimate_threshold, make_splits, ExperimentSplits, ProtocolError, SplitSpec,
};
use crate::dataio::{
    apply_preprocessor, extract_labels, fit_preprocessor, EncodedDataset, FeatureSchema,
    PreprocessorState, RawTable,
};
use crate::models::Detector;
use crate::numkernel::SeededRng;
use crate::protocol::compute_metrics;

/// Contamination sweep description.
///
/// `alpha_list` is explicit because published grids are non-uniform; use
/// [`SweepSpec::from_increment`] to expand an arithmetic `(step, max)` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub alpha_list: Vec<f64>,
    pub runs: usize,
    pub master_seed: u64,
}

impl SweepSpec {
    pub fn new(alpha_list: Vec<f64>, runs: usize, master_seed: u64) -> Result<Self, ProtocolError> {
        let spec = SweepSpec {
            alpha_list,
            runs,
            master_seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Arithmetic sweep `{0, step, 2*step, ...}` up to and including
    /// `alpha_max` (within one part in 1e9 of it).
    pub fn from_increment(
        alpha_step: f64,
        alpha_max: f64,
        runs: usize,
        master_seed: u64,
    ) -> Result<Self, ProtocolError> {
        if !(alpha_step > 0.0) || !alpha_step.is_finite() {
            return Err(ProtocolError::Domain(format!(
                "alpha step must be positive, got {alpha_step}"
            )));
        }
        let mut alpha_list = Vec::new();
        let mut k = 0usize;
        loop {
            let alpha = alpha_step * k as f64;
            if alpha > alpha_max * (1.0 + 1e-9) {
                break;
            }
            alpha_list.push(alpha);
            k += 1;
        }
        Self::new(alpha_list, runs, master_seed)
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.alpha_list.is_empty() {
            return Err(ProtocolError::Domain("alpha list is empty".into()));
        }
        for w in self.alpha_list.windows(2) {
            if !(w[1] > w[0]) {
                return Err(ProtocolError::Domain(format!(
                    "alpha list must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for &a in &self.alpha_list {
            if !(0.0..1.0).contains(&a) {
                return Err(ProtocolError::Domain(format!(
                    "alpha must be in [0, 1), got {a}"
                )));
            }
        }
        if self.runs == 0 {
            return Err(ProtocolError::Domain("runs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one `(model, dataset, alpha, seed)` evaluation cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub model_id: String,
    pub dataset_id: String,
    pub alpha: f64,
    pub seed: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub threshold: f64,
    pub achieved_contamination: f64,
}

/// A cell that failed, with enough context to locate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub run: usize,
    pub alpha: f64,
    pub message: String,
}

/// Records plus any per-cell failures; failures never abort other cells.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutcome {
    pub records: Vec<MetricsRecord>,
    pub failures: Vec<CellFailure>,
}

/// The dataset an experiment runs over.
///
/// Raw CSV data is preprocessed per run, fitting scaling statistics on
/// training-side rows only; already-numeric data (synthetic generators,
/// cached encodings) passes through row selection unchanged.
pub enum DataSource {
    Csv {
        table: RawTable,
        schema: FeatureSchema,
    },
    Encoded(EncodedDataset),
}

impl DataSource {
    pub fn labels(&self) -> Result<Vec<bool>, ProtocolError> {
        match self {
            DataSource::Csv { table, schema } => Ok(extract_labels(table, schema)?),
            DataSource::Encoded(ds) => Ok(ds.labels.clone()),
        }
    }

    pub fn n_rows(&self) -> usize {
        match self {
            DataSource::Csv { table, .. } => table.n_rows(),
            DataSource::Encoded(ds) => ds.n_rows(),
        }
    }

    fn fit_state(&self, fit_rows: &[usize]) -> Result<Option<PreprocessorState>, ProtocolError> {
        match self {
            DataSource::Csv { table, schema } => {
                Ok(Some(fit_preprocessor(table, fit_rows, schema)?))
            }
            DataSource::Encoded(_) => Ok(None),
        }
    }

    fn encode(
        &self,
        state: Option<&PreprocessorState>,
        rows: &[usize],
    ) -> Result<EncodedDataset, ProtocolError> {
        match self {
            DataSource::Csv { table, schema } => {
                let state = state.ok_or_else(|| {
                    ProtocolError::Domain("csv source needs a fitted preprocessor".into())
                })?;
                Ok(apply_preprocessor(state, table, rows, schema)?)
            }
            DataSource::Encoded(ds) => Ok(ds.select_rows(rows)),
        }
    }
}

/// Everything per-run that is independent of the contamination ratio.
struct RunContext {
    splits: ExperimentSplits,
    state: Option<PreprocessorState>,
    threshold_enc: EncodedDataset,
    final_enc: EncodedDataset,
}

fn prepare_run(
    source: &DataSource,
    split_spec: &SplitSpec,
    master_seed: u64,
    run: usize,
) -> Result<RunContext, ProtocolError> {
    let root = SeededRng::new(master_seed);
    let labels = source.labels()?;
    let mut split_rng = root.stream(&format!("run/{run}/split"));
    let splits = make_splits(&labels, split_spec, &mut split_rng)?;

    // Preprocessing statistics come from training-side rows only: the
    // training normals and the contamination pool.
    let mut fit_rows = splits.train_normals.clone();
    fit_rows.extend_from_slice(&splits.contamination_pool);
    let state = source.fit_state(&fit_rows)?;

    let threshold_enc = source.encode(state.as_ref(), &splits.threshold_set)?;
    let final_enc = source.encode(state.as_ref(), &splits.final_test)?;
    Ok(RunContext {
        splits,
        state,
        threshold_enc,
        final_enc,
    })
}

fn run_cell(
    source: &DataSource,
    ctx: &RunContext,
    master_seed: u64,
    run: usize,
    alpha_index: usize,
    alpha: f64,
    detector: &mut dyn Detector<f64>,
) -> Result<(f64, f64, super::MetricTriple), ProtocolError> {
    let root = SeededRng::new(master_seed);
    let mut contaminate_rng = root.stream(&format!("run/{run}/alpha/{alpha_index}/contaminate"));
    let (train_rows, achieved) = contaminate(
        &ctx.splits.train_normals,
        &ctx.splits.contamination_pool,
        alpha,
        &mut contaminate_rng,
    )?;
    let train_enc = source.encode(ctx.state.as_ref(), &train_rows)?;

    let mut fit_rng = root.stream(&format!("run/{run}/alpha/{alpha_index}/fit"));
    detector.fit(&train_enc.features, &mut fit_rng)?;

    let threshold_scores = detector.score(&ctx.threshold_enc.features)?;
    let estimate = estimate_threshold(&threshold_scores, &ctx.threshold_enc.labels)?;

    let final_scores = detector.score(&ctx.final_enc.features)?;
    let metrics = compute_metrics(&final_scores, &ctx.final_enc.labels, estimate.threshold);
    Ok((achieved, estimate.threshold, metrics))
}

/// One full run (all contamination ratios) of the protocol.
///
/// Splitting, preprocessing, contamination draws, and model fitting all
/// derive their randomness from `(master_seed, run, alpha index)` streams,
/// so any cell reproduces independently of execution order. The final test
/// rows are encoded once and only ever scored.
pub fn run_experiment_single_run(
    source: &DataSource,
    split_spec: &SplitSpec,
    alpha_list: &[f64],
    run: usize,
    master_seed: u64,
    model_id: &str,
    dataset_id: &str,
    factory: &(dyn Fn() -> Box<dyn Detector<f64>> + Sync),
) -> ExperimentOutcome {
    let mut outcome = ExperimentOutcome::default();
    let ctx = match prepare_run(source, split_spec, master_seed, run) {
        Ok(ctx) => ctx,
        Err(e) => {
            for &alpha in alpha_list {
                outcome.failures.push(CellFailure {
                    run,
                    alpha,
                    message: format!("run setup failed: {e}"),
                });
            }
            return outcome;
        }
    };
    for (ai, &alpha) in alpha_list.iter().enumerate() {
        let mut detector = factory();
        match run_cell(
            source,
            &ctx,
            master_seed,
            run,
            ai,
            alpha,
            detector.as_mut(),
        ) {
            Ok((achieved, threshold, m)) => outcome.records.push(MetricsRecord {
                model_id: model_id.to_string(),
                dataset_id: dataset_id.to_string(),
                alpha,
                seed: run as u64,
                precision: m.precision,
                recall: m.recall,
                f1: m.f1,
                threshold,
                achieved_contamination: achieved,
            }),
            Err(e) => outcome.failures.push(CellFailure {
                run,
                alpha,
                message: e.to_string(),
            }),
        }
    }
    outcome
}

/// Run the full sweep: `runs x |alpha_list|` cells for one model on one
/// dataset. A fresh detector is built for every cell; no warm starts.
pub fn run_experiment(
    source: &DataSource,
    split_spec: &SplitSpec,
    sweep: &SweepSpec,
    model_id: &str,
    dataset_id: &str,
    factory: &(dyn Fn() -> Box<dyn Detector<f64>> + Sync),
) -> Result<ExperimentOutcome, ProtocolError> {
    split_spec.validate()?;
    sweep.validate()?;
    let mut outcome = ExperimentOutcome::default();
    for run in 0..sweep.runs {
        let one = run_experiment_single_run(
            source,
            split_spec,
            &sweep.alpha_list,
            run,
            sweep.master_seed,
            model_id,
            dataset_id,
            factory,
        );
        outcome.records.extend(one.records);
        outcome.failures.extend(one.failures);
    }
    Ok(outcome)
}
