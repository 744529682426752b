use serde::{Deserialize, Serialize};

use super::{ColumnKind, DataError, FeatureSchema, RawTable};
use crate::Matrix;

/// Numeric feature matrix plus binary labels (true = attack), the universal
/// sample container of the harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedDataset {
    pub features: Matrix,
    pub labels: Vec<bool>,
    pub feature_names: Vec<String>,
}

impl EncodedDataset {
    pub fn n_rows(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn select_rows(&self, indices: &[usize]) -> EncodedDataset {
        EncodedDataset {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum ColumnState {
    Continuous { min: f64, max: f64 },
    Categorical { vocab: Vec<String> },
    Label,
    Ignore,
}

/// Per-column encoding parameters, fit from training-side rows only.
///
/// Continuous columns carry the training min/max; categorical columns a
/// vocabulary in first-appearance order. Applying the state never updates it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessorState {
    columns: Vec<ColumnState>,
}

impl PreprocessorState {
    /// Training min/max of a continuous column, by schema column index.
    pub fn continuous_range(&self, column: usize) -> Option<(f64, f64)> {
        match self.columns.get(column) {
            Some(ColumnState::Continuous { min, max }) => Some((*min, *max)),
            _ => None,
        }
    }

    /// Vocabulary of a categorical column, by schema column index.
    pub fn vocabulary(&self, column: usize) -> Option<&[String]> {
        match self.columns.get(column) {
            Some(ColumnState::Categorical { vocab }) => Some(vocab),
            _ => None,
        }
    }

    /// Total encoded feature width.
    pub fn feature_width(&self) -> usize {
        self.columns
            .iter()
            .map(|c| match c {
                ColumnState::Continuous { .. } => 1,
                ColumnState::Categorical { vocab } => vocab.len(),
                _ => 0,
            })
            .sum()
    }
}

fn parse_cell(table: &RawTable, row: usize, col: usize, name: &str) -> Result<f64, DataError> {
    let raw = table.cell(row, col).trim();
    raw.parse::<f64>().map_err(|_| DataError::Parse {
        row,
        column: name.to_string(),
        value: raw.to_string(),
    })
}

/// Fit min-max ranges and categorical vocabularies on the given rows.
/// The signature deliberately takes only the training-side subset, so a
/// fitted state cannot have seen test rows.
pub fn fit_preprocessor(
    table: &RawTable,
    rows: &[usize],
    schema: &FeatureSchema,
) -> Result<PreprocessorState, DataError> {
    schema.validate()?;
    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    if table.n_cols() != schema.columns.len() {
        return Err(DataError::Schema(format!(
            "table has {} columns, schema describes {}",
            table.n_cols(),
            schema.columns.len()
        )));
    }
    let mut columns = Vec::with_capacity(schema.columns.len());
    for (ci, spec) in schema.columns.iter().enumerate() {
        let state = match spec.kind {
            ColumnKind::Continuous => {
                let mut min = f64::INFINITY;
                let mut max = f64::NEG_INFINITY;
                for &r in rows {
                    let v = parse_cell(table, r, ci, &spec.name)?;
                    min = min.min(v);
                    max = max.max(v);
                }
                ColumnState::Continuous { min, max }
            }
            ColumnKind::Categorical => {
                let mut vocab: Vec<String> = Vec::new();
                for &r in rows {
                    let v = table.cell(r, ci);
                    if !vocab.iter().any(|known| known == v) {
                        vocab.push(v.to_string());
                    }
                }
                ColumnState::Categorical { vocab }
            }
            ColumnKind::Label => ColumnState::Label,
            ColumnKind::Ignore => ColumnState::Ignore,
        };
        columns.push(state);
    }
    Ok(PreprocessorState { columns })
}

/// Encode the given rows with a fitted state.
///
/// Continuous values map to `(v - min) / (max - min)` clamped to `[0, 1]`
/// (a constant training column maps to 0); categorical values one-hot encode
/// against the training vocabulary, unseen categories becoming an all-zero
/// block; the label column maps through the schema's attack/benign sets.
pub fn apply_preprocessor(
    state: &PreprocessorState,
    table: &RawTable,
    rows: &[usize],
    schema: &FeatureSchema,
) -> Result<EncodedDataset, DataError> {
    if state.columns.len() != schema.columns.len() {
        return Err(DataError::Schema(
            "preprocessor state does not match schema".into(),
        ));
    }
    let width = state.feature_width();
    let mut feature_names = Vec::with_capacity(width);
    for (ci, spec) in schema.columns.iter().enumerate() {
        match &state.columns[ci] {
            ColumnState::Continuous { .. } => feature_names.push(spec.name.clone()),
            ColumnState::Categorical { vocab } => {
                for v in vocab {
                    feature_names.push(format!("{}={}", spec.name, v));
                }
            }
            _ => {}
        }
    }

    let mut data = Vec::with_capacity(rows.len() * width);
    let mut labels = Vec::with_capacity(rows.len());
    for &r in rows {
        for (ci, spec) in schema.columns.iter().enumerate() {
            match &state.columns[ci] {
                ColumnState::Continuous { min, max } => {
                    let v = parse_cell(table, r, ci, &spec.name)?;
                    let scaled = if max > min {
                        ((v - min) / (max - min)).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    data.push(scaled);
                }
                ColumnState::Categorical { vocab } => {
                    let v = table.cell(r, ci);
                    for known in vocab {
                        data.push(if known == v { 1.0 } else { 0.0 });
                    }
                }
                ColumnState::Label => {
                    let v = table.cell(r, ci);
                    if schema.attack_labels.contains(v) {
                        labels.push(true);
                    } else if schema.benign_labels.contains(v) {
                        labels.push(false);
                    } else {
                        return Err(DataError::UnknownLabel {
                            row: r,
                            value: v.to_string(),
                        });
                    }
                }
                ColumnState::Ignore => {}
            }
        }
    }
    let features = Matrix::from_vec(rows.len(), width, data)
        .expect("row encoding emits exactly `width` values per row");
    Ok(EncodedDataset {
        features,
        labels,
        feature_names,
    })
}

/// Binary labels (true = attack) for every row of the table, without
/// encoding any features.
pub fn extract_labels(table: &RawTable, schema: &FeatureSchema) -> Result<Vec<bool>, DataError> {
    schema.validate()?;
    let li = schema.label_index();
    let mut labels = Vec::with_capacity(table.n_rows());
    for r in 0..table.n_rows() {
        let v = table.cell(r, li);
        if schema.attack_labels.contains(v) {
            labels.push(true);
        } else if schema.benign_labels.contains(v) {
            labels.push(false);
        } else {
            return Err(DataError::UnknownLabel {
                row: r,
                value: v.to_string(),
            });
        }
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::ColumnSpec;

    fn schema() -> FeatureSchema {
        FeatureSchema::new(
            vec![
                ColumnSpec {
                    name: "bytes".into(),
                    kind: ColumnKind::Continuous,
                },
                ColumnSpec {
                    name: "proto".into(),
                    kind: ColumnKind::Categorical,
                },
                ColumnSpec {
                    name: "note".into(),
                    kind: ColumnKind::Ignore,
                },
                ColumnSpec {
                    name: "label".into(),
                    kind: ColumnKind::Label,
                },
            ],
            ["attack".to_string()],
            ["normal".to_string()],
        )
        .unwrap()
    }

    fn table(rows: &[[&str; 4]]) -> RawTable {
        let mut t = RawTable::new(vec![
            "bytes".into(),
            "proto".into(),
            "note".into(),
            "label".into(),
        ]);
        for r in rows {
            t.push_row(r.iter().map(|s| s.to_string()).collect()).unwrap();
        }
        t
    }

    #[test]
    fn min_max_fit_and_midpoint_transform() {
        let t = table(&[
            ["2", "tcp", "x", "normal"],
            ["4", "udp", "x", "normal"],
            ["10", "tcp", "x", "attack"],
        ]);
        let s = schema();
        let state = fit_preprocessor(&t, &[0, 1, 2], &s).unwrap();
        assert_eq!(state.continuous_range(0), Some((2.0, 10.0)));

        let probe = table(&[["6", "tcp", "x", "normal"]]);
        let enc = apply_preprocessor(&state, &probe, &[0], &s).unwrap();
        assert_eq!(enc.features.get(0, 0), 0.5);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let t = table(&[["5", "tcp", "x", "normal"], ["5", "udp", "x", "attack"]]);
        let s = schema();
        let state = fit_preprocessor(&t, &[0, 1], &s).unwrap();
        assert_eq!(state.continuous_range(0), Some((5.0, 5.0)));
        let enc = apply_preprocessor(&state, &t, &[0, 1], &s).unwrap();
        assert_eq!(enc.features.get(0, 0), 0.0);
        assert_eq!(enc.features.get(1, 0), 0.0);
    }

    #[test]
    fn out_of_range_values_clamp() {
        let t = table(&[["2", "tcp", "x", "normal"], ["10", "tcp", "x", "normal"]]);
        let s = schema();
        let state = fit_preprocessor(&t, &[0, 1], &s).unwrap();
        let probe = table(&[["12", "tcp", "x", "normal"], ["-1", "tcp", "x", "normal"]]);
        let enc = apply_preprocessor(&state, &probe, &[0, 1], &s).unwrap();
        assert_eq!(enc.features.get(0, 0), 1.0);
        assert_eq!(enc.features.get(1, 0), 0.0);
    }

    #[test]
    fn first_appearance_vocabulary_and_one_hot() {
        let t = table(&[
            ["1", "tcp", "x", "normal"],
            ["2", "udp", "x", "normal"],
            ["3", "tcp", "x", "normal"],
            ["4", "icmp", "x", "attack"],
        ]);
        let s = schema();
        let state = fit_preprocessor(&t, &[0, 1, 2, 3], &s).unwrap();
        assert_eq!(
            state.vocabulary(1).unwrap(),
            &["tcp".to_string(), "udp".to_string(), "icmp".to_string()]
        );
        let enc = apply_preprocessor(&state, &t, &[1], &s).unwrap();
        assert_eq!(enc.feature_names, vec!["bytes", "proto=tcp", "proto=udp", "proto=icmp"]);
        assert_eq!(&enc.features.row(0)[1..], &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn unseen_category_encodes_to_zero_block() {
        let t = table(&[
            ["1", "tcp", "x", "normal"],
            ["2", "udp", "x", "normal"],
            ["3", "icmp", "x", "normal"],
        ]);
        let s = schema();
        let state = fit_preprocessor(&t, &[0, 1, 2], &s).unwrap();
        let probe = table(&[["1", "sctp", "x", "normal"]]);
        let enc = apply_preprocessor(&state, &probe, &[0], &s).unwrap();
        assert_eq!(&enc.features.row(0)[1..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn non_numeric_continuous_cell_reports_location() {
        let t = table(&[["abc", "tcp", "x", "normal"]]);
        let s = schema();
        match fit_preprocessor(&t, &[0], &s) {
            Err(DataError::Parse { row, column, value }) => {
                assert_eq!(row, 0);
                assert_eq!(column, "bytes");
                assert_eq!(value, "abc");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_label_is_reported() {
        let t = table(&[["1", "tcp", "x", "mystery"]]);
        let s = schema();
        let state = fit_preprocessor(&t, &[0], &s);
        // Fit does not touch labels; apply does.
        let state = state.unwrap();
        assert!(matches!(
            apply_preprocessor(&state, &t, &[0], &s),
            Err(DataError::UnknownLabel { row: 0, .. })
        ));
        assert!(matches!(
            extract_labels(&t, &s),
            Err(DataError::UnknownLabel { row: 0, .. })
        ));
    }

    #[test]
    fn encoding_is_idempotent_and_order_preserving() {
        let t = table(&[
            ["2", "tcp", "x", "normal"],
            ["4", "udp", "x", "attack"],
            ["10", "tcp", "x", "normal"],
        ]);
        let s = schema();
        let state = fit_preprocessor(&t, &[0, 1, 2], &s).unwrap();
        let a = apply_preprocessor(&state, &t, &[2, 0], &s).unwrap();
        let b = apply_preprocessor(&state, &t, &[2, 0], &s).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.labels, vec![false, false]);
        let full = apply_preprocessor(&state, &t, &[0, 1, 2], &s).unwrap();
        assert_eq!(full.features.row(2), a.features.row(0));
    }

    #[test]
    fn label_column_contributes_no_feature() {
        let t = table(&[["2", "tcp", "x", "normal"], ["4", "udp", "x", "attack"]]);
        let s = schema();
        let state = fit_preprocessor(&t, &[0, 1], &s).unwrap();
        let enc = apply_preprocessor(&state, &t, &[0, 1], &s).unwrap();
        // 1 continuous + 2 vocab entries; ignore and label add nothing.
        assert_eq!(enc.n_features(), 3);
        assert_eq!(enc.labels, vec![false, true]);
    }
}
