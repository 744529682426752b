use super::EncodedDataset;
use crate::numkernel::SeededRng;
use crate::Matrix;

/// 2D synthetic contaminated-data generator.
///
/// Normals are an equal mixture of two isotropic Gaussians at (-2, 0) and
/// (2, 0) with sigma 0.5 (even row indices draw from the left blob);
/// anomalies are an isotropic Gaussian at (0, 3) with sigma 0.5 and follow
/// the normals. Generation order is fixed, so a given rng reproduces the
/// dataset exactly.
pub fn make_toy2d(n_normal: usize, n_anomaly: usize, rng: &mut SeededRng) -> EncodedDataset {
    let sigma = 0.5;
    let mut rows = Vec::with_capacity(n_normal + n_anomaly);
    let mut labels = Vec::with_capacity(n_normal + n_anomaly);
    for i in 0..n_normal {
        let cx = if i % 2 == 0 { -2.0 } else { 2.0 };
        rows.push(vec![rng.normal(cx, sigma), rng.normal(0.0, sigma)]);
        labels.push(false);
    }
    for _ in 0..n_anomaly {
        rows.push(vec![rng.normal(0.0, sigma), rng.normal(3.0, sigma)]);
        labels.push(true);
    }
    EncodedDataset {
        features: Matrix::from_rows(&rows).expect("rows all carry two values"),
        labels,
        feature_names: vec!["x".into(), "y".into()],
    }
}
