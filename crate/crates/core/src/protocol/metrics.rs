use serde::{Deserialize, Serialize};

use super::ProtocolError;

/// Precision, recall, F1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTriple {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// A chosen decision threshold and the F1 it achieves on the estimation set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub threshold: f64,
    pub f1: f64,
}

fn f1_from_counts(tp: usize, fp: usize, total_pos: usize) -> MetricTriple {
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if total_pos == 0 {
        0.0
    } else {
        tp as f64 / total_pos as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    MetricTriple {
        precision,
        recall,
        f1,
    }
}

/// Pick the threshold maximizing F1 under the rule `score >= threshold`
/// predicts attack.
///
/// Candidates are the midpoints between consecutive distinct sorted scores
/// plus a below-minimum and an above-maximum sentinel (min - 1 and max + 1).
/// Ties in F1 resolve to the smallest threshold value.
pub fn estimate_threshold(
    scores: &[f64],
    labels: &[bool],
) -> Result<ThresholdEstimate, ProtocolError> {
    if scores.len() != labels.len() || scores.is_empty() {
        return Err(ProtocolError::Domain(format!(
            "scores and labels must align and be nonempty ({} vs {})",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(ProtocolError::Domain(
            "scores must be finite for threshold estimation".into(),
        ));
    }
    let total_pos = labels.iter().filter(|&&l| l).count();
    if total_pos == 0 {
        return Err(ProtocolError::NoPositives);
    }

    // Sort descending by score; sweep thresholds from above the maximum down,
    // so predicted positives accumulate group by group of equal scores.
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut best = ThresholdEstimate {
        threshold: scores[order[0]] + 1.0,
        f1: f1_from_counts(0, 0, total_pos).f1,
    };
    let (mut tp, mut fp) = (0usize, 0usize);
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
        // Candidate below this score group: midpoint to the next distinct
        // score, or the below-minimum sentinel after the last group.
        let candidate = if i < order.len() {
            (group_score + scores[order[i]]) / 2.0
        } else {
            group_score - 1.0
        };
        let f1 = f1_from_counts(tp, fp, total_pos).f1;
        if f1 >= best.f1 {
            best = ThresholdEstimate {
                threshold: candidate,
                f1,
            };
        }
    }
    Ok(best)
}

/// Confusion-matrix metrics with attack as the positive class and the
/// prediction rule `score >= threshold`.
///
/// Degenerate cases follow fixed conventions: precision 0 with no positive
/// predictions, recall 0 with no positive labels, F1 0 when both are 0.
pub fn compute_metrics(scores: &[f64], labels: &[bool], threshold: f64) -> MetricTriple {
    let total_pos = labels.iter().filter(|&&l| l).count();
    let mut tp = 0usize;
    let mut fp = 0usize;
    for (&s, &l) in scores.iter().zip(labels) {
        if s >= threshold {
            if l {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    f1_from_counts(tp, fp, total_pos)
}
