use serde::{Deserialize, Serialize};

use super::ProtocolError;

/// ROC curve points `(fpr, tpr)` from (0,0) to (1,1) and the area under it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// ROC curve and AUC with attack as the positive class.
///
/// Points are emitted at distinct-score boundaries, so tied scores move the
/// curve diagonally and the trapezoidal area equals the probability that a
/// random positive outscores a random negative, ties counting one half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<RocCurve, ProtocolError> {
    if scores.len() != labels.len() || scores.is_empty() {
        return Err(ProtocolError::Domain(
            "scores and labels must align and be nonempty".into(),
        ));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(ProtocolError::Domain("scores must be finite".into()));
    }
    let total_pos = labels.iter().filter(|&&l| l).count();
    let total_neg = labels.len() - total_pos;
    if total_pos == 0 || total_neg == 0 {
        return Err(ProtocolError::Domain(format!(
            "ROC needs both classes: {total_pos} positives, {total_neg} negatives"
        )));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let mut auc = 0.0;
    let (mut tp, mut fp) = (0usize, 0usize);
    let (mut prev_tp, mut prev_fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let group_score = scores[order[i]];
        while i < order.len() && scores[order[i]] == group_score {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let (x0, y0) = (
            prev_fp as f64 / total_neg as f64,
            prev_tp as f64 / total_pos as f64,
        );
        let (x1, y1) = (fp as f64 / total_neg as f64, tp as f64 / total_pos as f64);
        auc += (x1 - x0) * (y1 + y0) / 2.0;
        points.push((x1, y1));
        prev_tp = tp;
        prev_fp = fp;
    }
    Ok(RocCurve { points, auc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Exhaustive pairwise-count oracle: P(pos > neg) + 0.5 P(pos == neg).
    fn pairwise_auc(scores: &[f64], labels: &[bool]) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &li) in labels.iter().enumerate() {
            if !li {
                continue;
            }
            for (j, &lj) in labels.iter().enumerate() {
                if lj {
                    continue;
                }
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn perfect_separation_is_auc_one() {
        let curve = roc_auc(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(curve.auc, 1.0);
        assert_eq!(curve.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(curve.points.last(), Some(&(1.0, 1.0)));
    }

    #[test]
    fn all_ties_is_auc_half() {
        let curve = roc_auc(&[0.5, 0.5, 0.5, 0.5], &[true, false, true, false]).unwrap();
        assert_relative_eq!(curve.auc, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn worked_three_sample_example() {
        // Pairs: (0.8 > 0.6) wins, (0.4 < 0.6) loses; AUC = 1/2.
        let curve = roc_auc(&[0.8, 0.6, 0.4], &[true, false, true]).unwrap();
        assert_relative_eq!(curve.auc, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn matches_pairwise_oracle_on_random_instances() {
        let mut rng = crate::numkernel::SeededRng::new(11);
        for _ in 0..100 {
            let n = 4 + rng.below(50);
            let scores: Vec<f64> = (0..n).map(|_| (rng.below(10) as f64) / 3.0).collect();
            let mut labels: Vec<bool> = (0..n).map(|_| rng.below(2) == 1).collect();
            labels[0] = true;
            labels[1] = false;
            let curve = roc_auc(&scores, &labels).unwrap();
            assert_relative_eq!(curve.auc, pairwise_auc(&scores, &labels), epsilon = 1e-12);
        }
    }

    #[test]
    fn single_class_is_a_domain_error() {
        assert!(roc_auc(&[0.1, 0.2], &[true, true]).is_err());
        assert!(roc_auc(&[0.1, 0.2], &[false, false]).is_err());
    }
}
