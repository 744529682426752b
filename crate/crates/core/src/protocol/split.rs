use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::numkernel::SeededRng;

/// Split proportions.
///
/// `gamma_minus` of the normal rows become training normals; `gamma_plus` of
/// the attack rows are held aside as the contamination pool; everything else
/// is test, of which `threshold_fraction` is split off to pick the decision
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    pub threshold_fraction: f64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            gamma_minus: 0.5,
            gamma_plus: 0.2,
            threshold_fraction: 0.2,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if !(self.gamma_minus > 0.0 && self.gamma_minus <= 1.0) {
            return Err(ProtocolError::Domain(format!(
                "gamma_minus must be in (0, 1], got {}",
                self.gamma_minus
            )));
        }
        if !(0.0..1.0).contains(&self.gamma_plus) {
            return Err(ProtocolError::Domain(format!(
                "gamma_plus must be in [0, 1), got {}",
                self.gamma_plus
            )));
        }
        if !(self.threshold_fraction > 0.0 && self.threshold_fraction < 1.0) {
            return Err(ProtocolError::Domain(format!(
                "threshold_fraction must be in (0, 1), got {}",
                self.threshold_fraction
            )));
        }
        Ok(())
    }
}

/// Row-index sets of the four pairwise-disjoint subsets over one dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSplits {
    pub train_normals: Vec<usize>,
    pub contamination_pool: Vec<usize>,
    pub threshold_set: Vec<usize>,
    pub final_test: Vec<usize>,
}

/// Draw the four subsets from the labels alone.
///
/// Training normals are `ceil(gamma_minus * N-)` random negatives, the pool
/// `ceil(gamma_plus * N+)` random positives; the rest of both classes form
/// the test pool, from which a random `threshold_fraction` becomes the
/// threshold set and the remainder the final test set. The test-side label
/// composition is fixed before any contamination ratio is chosen.
pub fn make_splits(
    labels: &[bool],
    spec: &SplitSpec,
    rng: &mut SeededRng,
) -> Result<ExperimentSplits, ProtocolError> {
    spec.validate()?;
    let positives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let negatives: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    if positives.is_empty() || negatives.is_empty() {
        return Err(ProtocolError::Split(format!(
            "both classes required: {} positives, {} negatives",
            positives.len(),
            negatives.len()
        )));
    }

    let n_train = (spec.gamma_minus * negatives.len() as f64).ceil() as usize;
    let n_pool = (spec.gamma_plus * positives.len() as f64).ceil() as usize;

    let mut neg_rng = rng.stream("normals");
    let neg_order = neg_rng.sample_indices(negatives.len(), negatives.len());
    let train_normals: Vec<usize> = neg_order[..n_train].iter().map(|&i| negatives[i]).collect();
    let test_negatives: Vec<usize> = neg_order[n_train..].iter().map(|&i| negatives[i]).collect();

    let mut pos_rng = rng.stream("attacks");
    let pos_order = pos_rng.sample_indices(positives.len(), positives.len());
    let contamination_pool: Vec<usize> =
        pos_order[..n_pool].iter().map(|&i| positives[i]).collect();
    let test_positives: Vec<usize> = pos_order[n_pool..].iter().map(|&i| positives[i]).collect();

    let mut test: Vec<usize> = test_negatives;
    test.extend(test_positives);
    if test.is_empty() {
        return Err(ProtocolError::Split(
            "no rows left for the test side".into(),
        ));
    }
    let n_threshold = (spec.threshold_fraction * test.len() as f64).ceil() as usize;
    let mut thr_rng = rng.stream("threshold");
    let thr_order = thr_rng.sample_indices(test.len(), test.len());
    let threshold_set: Vec<usize> = thr_order[..n_threshold].iter().map(|&i| test[i]).collect();
    let final_test: Vec<usize> = thr_order[n_threshold..].iter().map(|&i| test[i]).collect();

    Ok(ExperimentSplits {
        train_normals,
        contamination_pool,
        threshold_set,
        final_test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn labels(n_neg: usize, n_pos: usize) -> Vec<bool> {
        let mut l = vec![false; n_neg];
        l.extend(vec![true; n_pos]);
        l
    }

    #[test]
    fn counts_follow_the_split_arithmetic() {
        let labels = labels(100, 40);
        let spec = SplitSpec {
            gamma_minus: 0.5,
            gamma_plus: 0.2,
            threshold_fraction: 0.2,
        };
        let mut rng = SeededRng::new(1);
        let s = make_splits(&labels, &spec, &mut rng).unwrap();
        assert_eq!(s.train_normals.len(), 50);
        assert_eq!(s.contamination_pool.len(), 8);
        // Test side: 50 normals + 32 attacks = 82, threshold ceil(16.4) = 17.
        assert_eq!(s.threshold_set.len(), 17);
        assert_eq!(s.final_test.len(), 65);
        assert!(s.train_normals.iter().all(|&i| !labels[i]));
        assert!(s.contamination_pool.iter().all(|&i| labels[i]));
    }

    #[test]
    fn gamma_plus_zero_empties_the_pool() {
        let labels = labels(30, 10);
        let spec = SplitSpec {
            gamma_plus: 0.0,
            ..SplitSpec::default()
        };
        let mut rng = SeededRng::new(2);
        let s = make_splits(&labels, &spec, &mut rng).unwrap();
        assert!(s.contamination_pool.is_empty());
    }

    #[test]
    fn subsets_are_pairwise_disjoint_and_cover_consistently() {
        let labels = labels(83, 41);
        let spec = SplitSpec::default();
        for seed in 0..100 {
            let mut rng = SeededRng::new(seed);
            let s = make_splits(&labels, &spec, &mut rng).unwrap();
            let sets = [
                &s.train_normals,
                &s.contamination_pool,
                &s.threshold_set,
                &s.final_test,
            ];
            let mut all = BTreeSet::new();
            let total: usize = sets.iter().map(|v| v.len()).sum();
            for set in sets {
                all.extend(set.iter().copied());
            }
            assert_eq!(all.len(), total, "seed {seed}: subsets overlap");
            assert_eq!(all.len(), labels.len(), "seed {seed}: rows lost");
        }
    }

    #[test]
    fn missing_class_is_a_split_error() {
        let spec = SplitSpec::default();
        let mut rng = SeededRng::new(3);
        assert!(matches!(
            make_splits(&labels(10, 0), &spec, &mut rng),
            Err(ProtocolError::Split(_))
        ));
        assert!(matches!(
            make_splits(&labels(0, 10), &spec, &mut rng),
            Err(ProtocolError::Split(_))
        ));
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let mut rng = SeededRng::new(4);
        for spec in [
            SplitSpec {
                gamma_minus: 0.0,
                ..SplitSpec::default()
            },
            SplitSpec {
                gamma_plus: 1.0,
                ..SplitSpec::default()
            },
            SplitSpec {
                threshold_fraction: 0.0,
                ..SplitSpec::default()
            },
        ] {
            assert!(make_splits(&labels(5, 5), &spec, &mut rng).is_err());
        }
    }
}
