use super::{DataError, EncodedDataset};

/// Headline numbers of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DatasetStats {
    pub samples: usize,
    pub features: usize,
    pub attack_ratio: f64,
}

pub fn dataset_stats(dataset: &EncodedDataset) -> Result<DatasetStats, DataError> {
    if dataset.n_rows() == 0 {
        return Err(DataError::Empty);
    }
    let positives = dataset.labels.iter().filter(|&&l| l).count();
    Ok(DatasetStats {
        samples: dataset.n_rows(),
        features: dataset.n_features(),
        attack_ratio: positives as f64 / dataset.n_rows() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix;

    fn dataset(n: usize, positives: usize, features: usize) -> EncodedDataset {
        let mut labels = vec![false; n];
        for l in labels.iter_mut().take(positives) {
            *l = true;
        }
        EncodedDataset {
            features: Matrix::zeros(n, features),
            labels,
            feature_names: (0..features).map(|i| format!("f{i}")).collect(),
        }
    }

    #[test]
    fn kddcup_scale_ratio() {
        // 10%-subset scale: 494,021 samples, 97,273 attacks.
        let ds = dataset(494_021, 97_273, 2);
        let stats = dataset_stats(&ds).unwrap();
        assert_eq!(stats.samples, 494_021);
        assert!((stats.attack_ratio - 0.1969).abs() < 5e-5);
    }

    #[test]
    fn all_benign_gives_zero_ratio() {
        let stats = dataset_stats(&dataset(12, 0, 3)).unwrap();
        assert_eq!(stats.attack_ratio, 0.0);
    }

    #[test]
    fn three_in_ten_gives_point_three() {
        let stats = dataset_stats(&dataset(10, 3, 1)).unwrap();
        assert_eq!(stats.attack_ratio, 0.3);
        assert_eq!(stats.features, 1);
    }

    #[test]
    fn empty_dataset_is_an_error() {
        assert!(dataset_stats(&dataset(0, 0, 2)).is_err());
    }
}
