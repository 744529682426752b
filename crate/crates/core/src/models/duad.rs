use serde::{Deserialize, Serialize};

use super::dae::DaeTrainer;
use super::{DaeConfig, DaeDetector, Detector, ModelError};
use crate::numkernel::{kmeans, Matrix, SeededRng};
use crate::Real;

/// Which representation the periodic re-selection clusters on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionSpace {
    /// Cluster the encoder's latent codes (default).
    Latent,
    /// Cluster scalar reconstruction errors.
    ReconError,
}

/// DUAD configuration: an inner autoencoder plus the cluster-selection loop.
///
/// Each of the `rounds` rounds trains the inner model for
/// `reselection_epochs` on the current subset, encodes the full training set,
/// clusters it into `clusters` groups, and keeps only the rows in clusters
/// whose dispersion falls at or below the `retain_quantile` quantile of
/// cluster dispersions. A final pass of `inner.epochs` runs on the final
/// subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuadConfig<T> {
    pub inner: DaeConfig<T>,
    pub clusters: usize,
    pub reselection_epochs: usize,
    pub retain_quantile: f64,
    pub rounds: usize,
    pub selection_space: SelectionSpace,
}

impl<T: Real> DuadConfig<T> {
    pub fn new(inner: DaeConfig<T>) -> Self {
        DuadConfig {
            inner,
            clusters: 10,
            reselection_epochs: 20,
            retain_quantile: 0.66,
            rounds: 3,
            selection_space: SelectionSpace::Latent,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.clusters < 2 {
            return Err(ModelError::Config(format!(
                "clusters must be >= 2, got {}",
                self.clusters
            )));
        }
        if self.rounds == 0 || self.reselection_epochs == 0 {
            return Err(ModelError::Config(
                "rounds and reselection_epochs must be >= 1".into(),
            ));
        }
        if !(self.retain_quantile > 0.0 && self.retain_quantile <= 1.0) {
            return Err(ModelError::Config(format!(
                "retain_quantile must be in (0, 1], got {}",
                self.retain_quantile
            )));
        }
        Ok(())
    }
}

/// Mean squared distance of each cluster's members to its centroid.
/// A cluster with no members gets an infinite dispersion.
pub fn cluster_dispersions<T: Real>(
    points: &Matrix<T>,
    assignments: &[usize],
    centroids: &Matrix<T>,
) -> Vec<T> {
    let k = centroids.rows();
    let mut sums = vec![T::zero(); k];
    let mut counts = vec![0usize; k];
    for (row, &a) in points.iter_rows().zip(assignments) {
        let mut d = T::zero();
        for (&x, &c) in row.iter().zip(centroids.row(a)) {
            let diff = x - c;
            d += diff * diff;
        }
        sums[a] += d;
        counts[a] += 1;
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, n)| {
            if n == 0 {
                T::infinity()
            } else {
                s / T::from_f64_lossy(n as f64)
            }
        })
        .collect()
}

/// Row indices whose cluster dispersion is at or below the
/// `retain_quantile` quantile of cluster dispersions.
///
/// The quantile is the `ceil(q * k)`-th smallest dispersion, so `q = 1.0`
/// keeps every cluster and the lowest-dispersion cluster is always kept.
/// Retained sets grow with `q` for a fixed clustering.
pub fn select_low_dispersion_rows<T: Real>(
    points: &Matrix<T>,
    assignments: &[usize],
    centroids: &Matrix<T>,
    retain_quantile: f64,
) -> Result<Vec<usize>, ModelError> {
    if !(retain_quantile > 0.0 && retain_quantile <= 1.0) {
        return Err(ModelError::Config(format!(
            "retain_quantile must be in (0, 1], got {retain_quantile}"
        )));
    }
    let k = centroids.rows();
    if k == 0 {
        return Err(ModelError::Selection("no clusters to select from".into()));
    }
    let dispersions = cluster_dispersions(points, assignments, centroids);
    let mut sorted: Vec<T> = dispersions.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("dispersions are not NaN"));
    let rank = ((retain_quantile * k as f64).ceil() as usize).clamp(1, k);
    let threshold = sorted[rank - 1];
    let retained: Vec<usize> = assignments
        .iter()
        .enumerate()
        .filter(|&(_, &a)| dispersions[a] <= threshold)
        .map(|(i, _)| i)
        .collect();
    if retained.is_empty() {
        return Err(ModelError::Selection(
            "selection retained no training rows".into(),
        ));
    }
    Ok(retained)
}

/// DUAD detector: the inner autoencoder plus the selection outcome.
#[derive(Debug, Clone)]
pub struct DuadDetector<T> {
    config: DuadConfig<T>,
    inner: Option<DaeDetector<T>>,
    retained: Vec<usize>,
    retained_per_round: Vec<usize>,
}

impl<T: Real> DuadDetector<T> {
    pub fn new(config: DuadConfig<T>) -> Self {
        DuadDetector {
            config,
            inner: None,
            retained: Vec::new(),
            retained_per_round: Vec::new(),
        }
    }

    pub fn config(&self) -> &DuadConfig<T> {
        &self.config
    }

    /// The fitted inner autoencoder.
    pub fn inner(&self) -> Result<&DaeDetector<T>, ModelError> {
        self.inner.as_ref().ok_or(ModelError::NotFitted)
    }

    /// Indices into the training matrix retained by the final selection.
    pub fn retained_rows(&self) -> &[usize] {
        &self.retained
    }

    /// Retained-subset size after each selection round.
    pub fn retained_per_round(&self) -> &[usize] {
        &self.retained_per_round
    }
}

impl<T: Real> Detector<T> for DuadDetector<T> {
    fn fit(&mut self, train: &Matrix<T>, rng: &mut SeededRng) -> Result<(), ModelError> {
        self.config.validate()?;
        let cfg = &self.config;
        if train.rows() < cfg.clusters {
            return Err(ModelError::Contract(format!(
                "training set has {} rows but clustering needs at least {}",
                train.rows(),
                cfg.clusters
            )));
        }
        let mut trainer = DaeTrainer::new(&cfg.inner, train, rng)?;
        let mut retained: Vec<usize> = (0..train.rows()).collect();
        let mut retained_per_round = Vec::with_capacity(cfg.rounds);
        for round in 0..cfg.rounds {
            let subset = train.select_rows(&retained);
            trainer.train_epochs(&subset, cfg.reselection_epochs)?;

            let codes = match cfg.selection_space {
                SelectionSpace::Latent => trainer.encode(train)?,
                SelectionSpace::ReconError => {
                    let scores = trainer.scores(train)?;
                    Matrix::from_vec(train.rows(), 1, scores).map_err(ModelError::Kernel)?
                }
            };
            let mut kmeans_rng = rng.stream(&format!("kmeans/{round}"));
            let clustering = kmeans(&codes, cfg.clusters, &mut kmeans_rng, 100)?;
            retained = select_low_dispersion_rows(
                &codes,
                &clustering.assignments,
                &clustering.centroids,
                cfg.retain_quantile,
            )?;
            retained_per_round.push(retained.len());
        }
        let final_subset = train.select_rows(&retained);
        trainer.train_epochs(&final_subset, cfg.inner.epochs)?;
        self.inner = Some(trainer.into_detector());
        self.retained = retained;
        self.retained_per_round = retained_per_round;
        Ok(())
    }

    fn score(&self, batch: &Matrix<T>) -> Result<Vec<T>, ModelError> {
        self.inner()?.score(batch)
    }
}

/// Fit a fresh DUAD detector on `train`.
pub fn fit_duad<T: Real>(
    config: &DuadConfig<T>,
    train: &Matrix<T>,
    rng: &mut SeededRng,
) -> Result<DuadDetector<T>, ModelError> {
    let mut det = DuadDetector::new(config.clone());
    det.fit(train, rng)?;
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::CenterMode;

    fn duad_config(lambda: f64, k: usize, p: f64, rounds: usize) -> DuadConfig<f64> {
        let mut inner = DaeConfig::<f64>::with_shape(2, &[8], 2);
        inner.lambda = lambda;
        inner.center_mode = if lambda > 0.0 {
            CenterMode::Learnable
        } else {
            CenterMode::FixedZero
        };
        inner.epochs = 30;
        inner.batch_size = 32;
        let mut cfg = DuadConfig::new(inner);
        cfg.clusters = k;
        cfg.retain_quantile = p;
        cfg.rounds = rounds;
        cfg.reselection_epochs = 15;
        cfg
    }

    /// Tight blob near the origin plus a widely dispersed blob far away.
    fn tight_and_dispersed(n_tight: usize, n_disp: usize, seed: u64) -> Matrix<f64> {
        let mut rng = SeededRng::new(seed);
        let mut rows = Vec::with_capacity(n_tight + n_disp);
        for _ in 0..n_tight {
            rows.push(vec![rng.normal(0.0, 0.1), rng.normal(0.0, 0.1)]);
        }
        for _ in 0..n_disp {
            rows.push(vec![rng.normal(5.0, 2.0), rng.normal(5.0, 2.0)]);
        }
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn retain_everything_when_quantile_is_one() {
        let train = tight_and_dispersed(40, 40, 1);
        let cfg = duad_config(0.0, 4, 1.0, 2);
        let mut rng = SeededRng::new(2);
        let det = fit_duad(&cfg, &train, &mut rng).unwrap();
        let expected: Vec<usize> = (0..train.rows()).collect();
        assert_eq!(det.retained_rows(), expected.as_slice());
        assert_eq!(det.retained_per_round(), &[80, 80]);
    }

    #[test]
    fn dispersed_cluster_is_dropped() {
        let train = tight_and_dispersed(120, 120, 3);
        let cfg = duad_config(0.0, 2, 0.5, 2);
        let mut rng = SeededRng::new(4);
        let det = fit_duad(&cfg, &train, &mut rng).unwrap();
        assert!(!det.retained_rows().is_empty());
        // Rows 0..120 form the tight blob.
        assert!(
            det.retained_rows().iter().all(|&i| i < 120),
            "retained rows leak into the dispersed blob: {:?}",
            det.retained_rows().iter().filter(|&&i| i >= 120).count()
        );
    }

    #[test]
    fn selection_on_raw_points_matches_direct_dispersion_comparison() {
        // Oracle path: cluster the raw constructed data and compare cluster
        // dispersions directly.
        let pts = tight_and_dispersed(50, 50, 5);
        let mut rng = SeededRng::new(6);
        let res = kmeans(&pts, 2, &mut rng, 100).unwrap();
        let disp = cluster_dispersions(&pts, &res.assignments, &res.centroids);
        let tight_cluster = if disp[0] < disp[1] { 0 } else { 1 };
        let retained =
            select_low_dispersion_rows(&pts, &res.assignments, &res.centroids, 0.5).unwrap();
        assert!(retained
            .iter()
            .all(|&i| res.assignments[i] == tight_cluster));
        assert!(retained.iter().all(|&i| i < 50));
    }

    #[test]
    fn retained_set_grows_with_quantile() {
        let pts = tight_and_dispersed(60, 60, 7);
        let mut rng = SeededRng::new(8);
        let res = kmeans(&pts, 4, &mut rng, 100).unwrap();
        let mut prev: Option<Vec<usize>> = None;
        for p in [0.25, 0.5, 0.75, 1.0] {
            let sel =
                select_low_dispersion_rows(&pts, &res.assignments, &res.centroids, p).unwrap();
            if let Some(prev) = &prev {
                assert!(
                    prev.iter().all(|i| sel.contains(i)),
                    "selection at smaller quantile is not nested"
                );
            }
            prev = Some(sel);
        }
        assert_eq!(prev.unwrap().len(), pts.rows());
    }

    #[test]
    fn retained_rows_are_subset_of_input() {
        let train = tight_and_dispersed(30, 30, 9);
        let cfg = duad_config(1.0, 3, 0.66, 2);
        let mut rng = SeededRng::new(10);
        let det = fit_duad(&cfg, &train, &mut rng).unwrap();
        assert!(det.retained_rows().iter().all(|&i| i < train.rows()));
        let mut sorted = det.retained_rows().to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), det.retained_rows().len());
    }

    #[test]
    fn too_few_rows_for_clustering_is_an_error() {
        let train = tight_and_dispersed(2, 2, 11);
        let cfg = duad_config(0.0, 10, 0.5, 1);
        let mut rng = SeededRng::new(12);
        assert!(matches!(
            fit_duad(&cfg, &train, &mut rng),
            Err(ModelError::Contract(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = duad_config(0.0, 1, 0.5, 1);
        cfg.clusters = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = duad_config(0.0, 2, 0.0, 1);
        cfg.retain_quantile = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = duad_config(0.0, 2, 0.5, 1);
        cfg.rounds = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn duad_fit_is_deterministic() {
        let train = tight_and_dispersed(40, 40, 13);
        let cfg = duad_config(1.0, 4, 0.75, 2);
        let run = || {
            let mut rng = SeededRng::new(14);
            fit_duad(&cfg, &train, &mut rng).unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a.retained_rows(), b.retained_rows());
        assert_eq!(
            a.inner().unwrap().params().unwrap(),
            b.inner().unwrap().params().unwrap()
        );
    }

    #[test]
    fn recon_error_selection_space_also_drops_dispersed_rows() {
        let train = tight_and_dispersed(100, 100, 15);
        let mut cfg = duad_config(0.0, 2, 0.5, 1);
        cfg.selection_space = SelectionSpace::ReconError;
        let mut rng = SeededRng::new(16);
        let det = fit_duad(&cfg, &train, &mut rng).unwrap();
        assert!(!det.retained_rows().is_empty());
    }
}
