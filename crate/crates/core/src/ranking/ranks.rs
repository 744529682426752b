use serde::{Deserialize, Serialize};

use super::RankError;

/// One evaluation condition: a dataset at a contamination ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub dataset: String,
    pub alpha: f64,
}

/// Complete models-by-conditions table of mean F1 values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub models: Vec<String>,
    pub conditions: Vec<Condition>,
    /// `values[m][c]` is model `m`'s mean F1 under condition `c`.
    pub values: Vec<Vec<f64>>,
}

impl ScoreTable {
    pub fn validate(&self) -> Result<(), RankError> {
        if self.models.is_empty() || self.conditions.is_empty() {
            return Err(RankError::Table("table has no models or conditions".into()));
        }
        if self.values.len() != self.models.len() {
            return Err(RankError::Table("one value row per model required".into()));
        }
        for (m, row) in self.values.iter().enumerate() {
            if row.len() != self.conditions.len() {
                return Err(RankError::Table(format!(
                    "model {:?} covers {} of {} conditions",
                    self.models[m],
                    row.len(),
                    self.conditions.len()
                )));
            }
            for &v in row {
                if !(0.0..=1.0).contains(&v) {
                    return Err(RankError::Table(format!(
                        "F1 value {v} out of [0, 1] for model {:?}",
                        self.models[m]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Average rank per model over all conditions; rank 1 is the highest F1 in a
/// condition and ties share the mean of their ranks.
pub fn average_ranks(table: &ScoreTable) -> Result<Vec<f64>, RankError> {
    table.validate()?;
    let n_models = table.models.len();
    let mut sums = vec![0.0; n_models];
    for c in 0..table.conditions.len() {
        let mut order: Vec<usize> = (0..n_models).collect();
        order.sort_by(|&a, &b| table.values[b][c].total_cmp(&table.values[a][c]));
        let mut i = 0;
        while i < n_models {
            let mut j = i;
            while j < n_models && table.values[order[j]][c] == table.values[order[i]][c] {
                j += 1;
            }
            let avg_rank = (i + j + 1) as f64 / 2.0;
            for &m in &order[i..j] {
                sums[m] += avg_rank;
            }
            i = j;
        }
    }
    let n_cond = table.conditions.len() as f64;
    Ok(sums.into_iter().map(|s| s / n_cond).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table(models: &[&str], values: Vec<Vec<f64>>) -> ScoreTable {
        let n_cond = values[0].len();
        ScoreTable {
            models: models.iter().map(|s| s.to_string()).collect(),
            conditions: (0..n_cond)
                .map(|i| Condition {
                    dataset: "d".into(),
                    alpha: i as f64 * 0.05,
                })
                .collect(),
            values,
        }
    }

    #[test]
    fn dominant_model_ranks_first_everywhere() {
        let t = table(
            &["a", "b"],
            vec![vec![0.9, 0.8, 0.95], vec![0.5, 0.6, 0.7]],
        );
        let ranks = average_ranks(&t).unwrap();
        assert_eq!(ranks, vec![1.0, 2.0]);
    }

    #[test]
    fn exact_ties_share_the_mean_rank() {
        let t = table(&["a", "b"], vec![vec![0.7], vec![0.7]]);
        let ranks = average_ranks(&t).unwrap();
        assert_eq!(ranks, vec![1.5, 1.5]);
    }

    #[test]
    fn hand_tabulated_two_condition_example() {
        // Condition 1 values (0.9, 0.8, 0.7) rank (1, 2, 3);
        // condition 2 values (0.7, 0.9, 0.8) rank (3, 1, 2);
        // averages (2.0, 1.5, 2.5).
        let t = table(
            &["a", "b", "c"],
            vec![vec![0.9, 0.7], vec![0.8, 0.9], vec![0.7, 0.8]],
        );
        let ranks = average_ranks(&t).unwrap();
        assert_relative_eq!(ranks[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(ranks[1], 1.5, epsilon = 1e-12);
        assert_relative_eq!(ranks[2], 2.5, epsilon = 1e-12);
    }

    #[test]
    fn ranks_depend_only_on_order_within_conditions() {
        // Any strictly monotone transformation of a condition column leaves
        // ranks unchanged.
        let base = table(
            &["a", "b", "c"],
            vec![vec![0.9, 0.2], vec![0.5, 0.8], vec![0.1, 0.5]],
        );
        let transformed = table(
            &["a", "b", "c"],
            vec![
                vec![0.9f64.powi(3), 0.2f64.sqrt() / 2.0],
                vec![0.5f64.powi(3), 0.8f64.sqrt() / 2.0],
                vec![0.1f64.powi(3), 0.5f64.sqrt() / 2.0],
            ],
        );
        assert_eq!(
            average_ranks(&base).unwrap(),
            average_ranks(&transformed).unwrap()
        );
    }

    #[test]
    fn empty_or_ragged_tables_are_rejected() {
        let t = ScoreTable {
            models: vec![],
            conditions: vec![],
            values: vec![],
        };
        assert!(average_ranks(&t).is_err());
        let t = table(&["a", "b"], vec![vec![0.5], vec![0.5, 0.6]]);
        assert!(average_ranks(&t).is_err());
    }
}
