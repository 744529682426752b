use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{
    average_ranks, cd_groups, effect_size, holm_adjust, wilcoxon_signed_rank, Condition,
    RankError, ScoreTable,
};
use crate::protocol::MetricsRecord;

/// One pairwise model comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseResult {
    pub model_a: String,
    pub model_b: String,
    pub statistic: f64,
    pub raw_p: f64,
    pub adjusted_p: f64,
    pub effect_size: f64,
    pub n_effective: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRank {
    pub model: String,
    pub rank: f64,
}

/// Full statistical comparison report.
///
/// `pairing` records the unit the signed-rank tests paired on:
/// `per_seed` when every model covers the identical (dataset, alpha, seed)
/// cells, otherwise `per_condition_mean`. Conditions weigh equally per
/// (dataset, alpha) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub average_ranks: Vec<ModelRank>,
    pub pairwise: Vec<PairwiseResult>,
    pub cliques: Vec<Vec<String>>,
    pub level: f64,
    pub pairing: String,
    pub condition_weighting: String,
    pub excluded_models: Vec<String>,
}

type ConditionKey = (String, u64);
type CellKey = (String, u64, u64);

fn alpha_bits(alpha: f64) -> u64 {
    alpha.to_bits()
}

/// Build the report from raw evaluation records.
///
/// Models that do not cover every observed (dataset, alpha) condition are
/// excluded and listed. At least two covered models are required.
pub fn build_rank_report(records: &[MetricsRecord], level: f64) -> Result<RankReport, RankError> {
    if !(0.0..=1.0).contains(&level) {
        return Err(RankError::Domain(format!(
            "significance level must be in [0, 1], got {level}"
        )));
    }
    // Mean F1 per (model, dataset, alpha); per-seed values for pairing.
    let mut by_model: BTreeMap<String, BTreeMap<ConditionKey, Vec<f64>>> = BTreeMap::new();
    let mut by_model_cells: BTreeMap<String, BTreeMap<CellKey, f64>> = BTreeMap::new();
    let mut conditions: BTreeSet<ConditionKey> = BTreeSet::new();
    for r in records {
        let cond = (r.dataset_id.clone(), alpha_bits(r.alpha));
        conditions.insert(cond.clone());
        by_model
            .entry(r.model_id.clone())
            .or_default()
            .entry(cond)
            .or_default()
            .push(r.f1);
        by_model_cells
            .entry(r.model_id.clone())
            .or_default()
            .insert((r.dataset_id.clone(), alpha_bits(r.alpha), r.seed), r.f1);
    }
    if conditions.is_empty() {
        return Err(RankError::Table("no records to rank".into()));
    }

    let mut included: Vec<String> = Vec::new();
    let mut excluded: Vec<String> = Vec::new();
    for (model, conds) in &by_model {
        if conditions.iter().all(|c| conds.contains_key(c)) {
            included.push(model.clone());
        } else {
            excluded.push(model.clone());
        }
    }
    if included.len() < 2 {
        return Err(RankError::Table(format!(
            "ranking needs at least 2 models with complete coverage, found {}",
            included.len()
        )));
    }

    let condition_list: Vec<ConditionKey> = conditions.into_iter().collect();
    let values: Vec<Vec<f64>> = included
        .iter()
        .map(|m| {
            condition_list
                .iter()
                .map(|c| {
                    let f1s = &by_model[m][c];
                    f1s.iter().sum::<f64>() / f1s.len() as f64
                })
                .collect()
        })
        .collect();
    let table = ScoreTable {
        models: included.clone(),
        conditions: condition_list
            .iter()
            .map(|(d, a)| Condition {
                dataset: d.clone(),
                alpha: f64::from_bits(*a),
            })
            .collect(),
        values: values.clone(),
    };
    let ranks = average_ranks(&table)?;

    // Per-seed pairing applies only when every model covers the identical
    // (dataset, alpha, seed) cells.
    let reference_cells: BTreeSet<CellKey> =
        by_model_cells[&included[0]].keys().cloned().collect();
    let per_seed = included.iter().all(|m| {
        let cells: BTreeSet<CellKey> = by_model_cells[m].keys().cloned().collect();
        cells == reference_cells
    });

    let paired_values: Vec<Vec<f64>> = if per_seed {
        included
            .iter()
            .map(|m| {
                reference_cells
                    .iter()
                    .map(|k| by_model_cells[m][k])
                    .collect()
            })
            .collect()
    } else {
        values
    };

    let n = included.len();
    let mut raw_ps = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&paired_values[i], &paired_values[j]);
            let nonzero = a.iter().zip(b).filter(|(x, y)| x != y).count();
            let (statistic, raw_p, n_effective) = if nonzero < 2 {
                // A single differing pair cannot reach significance; the
                // exact two-sided p over its sign patterns is 1.
                (0.0, 1.0, nonzero)
            } else {
                let out = wilcoxon_signed_rank(a, b)?;
                (out.statistic, out.p_value, out.n_effective)
            };
            let eff = effect_size(a, b)?;
            raw_ps.push(raw_p);
            pairs.push((i, j, statistic, raw_p, eff, n_effective));
        }
    }
    let adjusted = holm_adjust(&raw_ps)?;

    let mut adj_matrix = vec![vec![1.0; n]; n];
    let mut pairwise = Vec::with_capacity(pairs.len());
    for ((i, j, statistic, raw_p, eff, n_effective), adj) in pairs.into_iter().zip(adjusted) {
        adj_matrix[i][j] = adj;
        adj_matrix[j][i] = adj;
        pairwise.push(PairwiseResult {
            model_a: included[i].clone(),
            model_b: included[j].clone(),
            statistic,
            raw_p,
            adjusted_p: adj,
            effect_size: eff,
            n_effective,
        });
    }

    let clique_indices = cd_groups(&ranks, &adj_matrix, level)?;
    let cliques = clique_indices
        .into_iter()
        .map(|c| c.into_iter().map(|i| included[i].clone()).collect())
        .collect();

    let mut average_ranks: Vec<ModelRank> = included
        .iter()
        .zip(&ranks)
        .map(|(m, &r)| ModelRank {
            model: m.clone(),
            rank: r,
        })
        .collect();
    average_ranks.sort_by(|a, b| a.rank.total_cmp(&b.rank).then(a.model.cmp(&b.model)));

    Ok(RankReport {
        average_ranks,
        pairwise,
        cliques,
        level,
        pairing: if per_seed {
            "per_seed".to_string()
        } else {
            "per_condition_mean".to_string()
        },
        condition_weighting: "equal_per_cell".to_string(),
        excluded_models: excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(model: &str, dataset: &str, alpha: f64, seed: u64, f1: f64) -> MetricsRecord {
        MetricsRecord {
            model_id: model.into(),
            dataset_id: dataset.into(),
            alpha,
            seed,
            precision: f1,
            recall: f1,
            f1,
            threshold: 0.5,
            achieved_contamination: alpha,
        }
    }

    fn grid(model: &str, f1: impl Fn(f64, u64) -> f64) -> Vec<MetricsRecord> {
        let mut out = Vec::new();
        for &alpha in &[0.0, 0.1] {
            for seed in 0..5 {
                out.push(record(model, "toy", alpha, seed, f1(alpha, seed)));
            }
        }
        out
    }

    #[test]
    fn dominant_model_gets_rank_one_and_separates() {
        let mut records = grid("good", |a, s| 0.9 - a + s as f64 * 0.001);
        records.extend(grid("bad", |a, s| 0.5 - a + s as f64 * 0.001));
        let report = build_rank_report(&records, 0.05).unwrap();
        assert_eq!(report.average_ranks[0].model, "good");
        assert_eq!(report.average_ranks[0].rank, 1.0);
        assert_eq!(report.average_ranks[1].rank, 2.0);
        assert_eq!(report.pairing, "per_seed");
        // 10 aligned pairs all favoring "good": p = 2/1024, holm x1.
        let p = &report.pairwise[0];
        assert!(p.raw_p < 0.05);
        assert_eq!(p.adjusted_p, p.raw_p);
        assert_eq!(p.effect_size.abs(), 1.0);
        assert_eq!(report.cliques, vec![vec!["good".to_string()], vec!["bad".to_string()]]);
    }

    #[test]
    fn identical_models_form_one_clique() {
        let mut records = grid("a", |a, s| 0.8 - a + s as f64 * 0.002);
        records.extend(grid("b", |a, s| 0.8 - a + s as f64 * 0.002));
        let report = build_rank_report(&records, 0.05).unwrap();
        assert_eq!(report.pairwise[0].raw_p, 1.0);
        assert_eq!(report.pairwise[0].n_effective, 0);
        assert_eq!(report.cliques.len(), 1);
        assert_eq!(report.cliques[0].len(), 2);
    }

    #[test]
    fn incomplete_models_are_excluded_and_listed() {
        let mut records = grid("full_a", |a, s| 0.9 - a + s as f64 * 0.001);
        records.extend(grid("full_b", |a, s| 0.6 - a + s as f64 * 0.001));
        records.push(record("partial", "toy", 0.0, 0, 0.99));
        let report = build_rank_report(&records, 0.05).unwrap();
        assert_eq!(report.excluded_models, vec!["partial".to_string()]);
        assert_eq!(report.average_ranks.len(), 2);
    }

    #[test]
    fn misaligned_seeds_fall_back_to_condition_means() {
        let mut records = grid("a", |a, s| 0.9 - a + s as f64 * 0.001);
        // Model b covers the same conditions but with different seeds.
        for &alpha in &[0.0, 0.1] {
            for seed in 10..15 {
                records.push(record("b", "toy", alpha, seed, 0.5 - alpha));
            }
        }
        let report = build_rank_report(&records, 0.05).unwrap();
        assert_eq!(report.pairing, "per_condition_mean");
        assert_eq!(report.pairwise[0].n_effective, 2);
    }

    #[test]
    fn fewer_than_two_models_is_an_error() {
        let records = grid("only", |a, _| 0.9 - a);
        assert!(build_rank_report(&records, 0.05).is_err());
    }
}
