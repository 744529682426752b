use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DataError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Continuous,
    Categorical,
    Label,
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

/// Column-by-column description of a flow-feature CSV.
///
/// Exactly one column must be the label; `attack_labels` and `benign_labels`
/// are disjoint sets of label strings and together must cover every label
/// value the data contains (anything else is reported at encoding time).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub columns: Vec<ColumnSpec>,
    pub attack_labels: BTreeSet<String>,
    pub benign_labels: BTreeSet<String>,
}

impl FeatureSchema {
    pub fn new(
        columns: Vec<ColumnSpec>,
        attack_labels: impl IntoIterator<Item = String>,
        benign_labels: impl IntoIterator<Item = String>,
    ) -> Result<Self, DataError> {
        let schema = FeatureSchema {
            columns,
            attack_labels: attack_labels.into_iter().collect(),
            benign_labels: benign_labels.into_iter().collect(),
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let labels = self
            .columns
            .iter()
            .filter(|c| c.kind == ColumnKind::Label)
            .count();
        if labels != 1 {
            return Err(DataError::Schema(format!(
                "exactly one label column required, found {labels}"
            )));
        }
        if let Some(shared) = self.attack_labels.intersection(&self.benign_labels).next() {
            return Err(DataError::Schema(format!(
                "label value {shared:?} is listed as both attack and benign"
            )));
        }
        if self.attack_labels.is_empty() && self.benign_labels.is_empty() {
            return Err(DataError::Schema(
                "attack and benign label sets are both empty".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for c in &self.columns {
            if !seen.insert(&c.name) {
                return Err(DataError::Schema(format!(
                    "duplicate column name {:?}",
                    c.name
                )));
            }
        }
        Ok(())
    }

    pub fn label_index(&self) -> usize {
        self.columns
            .iter()
            .position(|c| c.kind == ColumnKind::Label)
            .expect("validated schema has a label column")
    }

    pub fn load(path: &Path) -> Result<Self, DataError> {
        let f = std::fs::File::open(path).map_err(|e| DataError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let schema: FeatureSchema = serde_json::from_reader(std::io::BufReader::new(f))
            .map_err(|e| DataError::Schema(format!("{}: {e}", path.display())))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn save(&self, path: &Path) -> Result<(), DataError> {
        let f = std::fs::File::create(path).map_err(|e| DataError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(f), self)
            .map_err(|e| DataError::Schema(format!("write {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(name: &str, kind: ColumnKind) -> ColumnSpec {
        ColumnSpec {
            name: name.into(),
            kind,
        }
    }

    #[test]
    fn accepts_a_well_formed_schema() {
        let s = FeatureSchema::new(
            vec![
                col("duration", ColumnKind::Continuous),
                col("protocol", ColumnKind::Categorical),
                col("label", ColumnKind::Label),
            ],
            ["attack".to_string()],
            ["normal".to_string()],
        )
        .unwrap();
        assert_eq!(s.label_index(), 2);
    }

    #[test]
    fn rejects_zero_or_two_label_columns() {
        assert!(FeatureSchema::new(
            vec![col("a", ColumnKind::Continuous)],
            ["x".to_string()],
            ["y".to_string()],
        )
        .is_err());
        assert!(FeatureSchema::new(
            vec![col("a", ColumnKind::Label), col("b", ColumnKind::Label)],
            ["x".to_string()],
            ["y".to_string()],
        )
        .is_err());
    }

    #[test]
    fn rejects_overlapping_label_sets() {
        assert!(FeatureSchema::new(
            vec![col("label", ColumnKind::Label)],
            ["both".to_string()],
            ["both".to_string()],
        )
        .is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = FeatureSchema::new(
            vec![
                col("bytes", ColumnKind::Continuous),
                col("flag", ColumnKind::Categorical),
                col("class", ColumnKind::Label),
                col("note", ColumnKind::Ignore),
            ],
            ["dos".to_string(), "probe".to_string()],
            ["normal".to_string()],
        )
        .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: FeatureSchema = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }
}
