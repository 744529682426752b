use super::matrix::sq_dist;
use super::{KernelError, Matrix, SeededRng};
use crate::Real;

/// Outcome of Lloyd's algorithm.
#[derive(Debug, Clone)]
pub struct KmeansResult<T> {
    /// Cluster index per input row, each in `[0, k)`.
    pub assignments: Vec<usize>,
    /// `k` centroids, one per row.
    pub centroids: Matrix<T>,
    /// Sum of squared distances of points to their assigned centroid.
    pub inertia: T,
    /// Inertia after each iteration; non-increasing.
    pub inertia_history: Vec<T>,
}

/// Seeded Lloyd's k-means with a deterministic farthest-point rule for empty
/// clusters.
///
/// Initial centroids are `k` distinct rows sampled from `rng`; ties in the
/// assignment step break toward the lower cluster index. If an iteration
/// leaves a cluster empty, the point farthest from its assigned centroid is
/// moved to the empty cluster, so the returned assignment never contains an
/// empty cluster.
pub fn kmeans<T: Real>(
    points: &Matrix<T>,
    k: usize,
    rng: &mut SeededRng,
    max_iter: usize,
) -> Result<KmeansResult<T>, KernelError> {
    let n = points.rows();
    if n == 0 {
        return Err(KernelError::Domain("kmeans on an empty point set".into()));
    }
    if k == 0 || k > n {
        return Err(KernelError::Domain(format!(
            "kmeans needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    points.check_finite("kmeans input")?;

    let seeds = rng.sample_indices(n, k);
    let mut centroids = points.select_rows(&seeds);
    let mut assignments = vec![0usize; n];
    let mut inertia_history = Vec::new();
    let mut prev_assignments: Option<Vec<usize>> = None;

    for _ in 0..max_iter.max(1) {
        assign_nearest(points, &centroids, &mut assignments);
        fix_empty_clusters(points, &mut centroids, &mut assignments, k);
        update_centroids(points, &assignments, &mut centroids, k);
        let inertia = total_inertia(points, &centroids, &assignments);
        inertia_history.push(inertia);
        if prev_assignments.as_deref() == Some(&assignments) {
            break;
        }
        prev_assignments = Some(assignments.clone());
    }

    // Final assignment against the final centroids, with the empty-cluster
    // guarantee re-established.
    assign_nearest(points, &centroids, &mut assignments);
    fix_empty_clusters(points, &mut centroids, &mut assignments, k);
    update_centroids(points, &assignments, &mut centroids, k);
    let inertia = total_inertia(points, &centroids, &assignments);
    if inertia_history.last() != Some(&inertia) {
        inertia_history.push(inertia);
    }

    Ok(KmeansResult {
        assignments,
        centroids,
        inertia,
        inertia_history,
    })
}

fn assign_nearest<T: Real>(points: &Matrix<T>, centroids: &Matrix<T>, out: &mut [usize]) {
    for (i, row) in points.iter_rows().enumerate() {
        let mut best = 0usize;
        let mut best_d = sq_dist(row, centroids.row(0));
        for c in 1..centroids.rows() {
            let d = sq_dist(row, centroids.row(c));
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        out[i] = best;
    }
}

/// Move the farthest-from-centroid point into each empty cluster.
/// Deterministic: the candidate with the greatest distance wins, ties broken
/// by the lowest row index; donor clusters of size one are not raided.
fn fix_empty_clusters<T: Real>(
    points: &Matrix<T>,
    centroids: &mut Matrix<T>,
    assignments: &mut [usize],
    k: usize,
) {
    loop {
        let mut counts = vec![0usize; k];
        for &a in assignments.iter() {
            counts[a] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut far_idx = usize::MAX;
        let mut far_d = T::neg_infinity();
        for (i, row) in points.iter_rows().enumerate() {
            if counts[assignments[i]] <= 1 {
                continue;
            }
            let d = sq_dist(row, centroids.row(assignments[i]));
            if d > far_d {
                far_d = d;
                far_idx = i;
            }
        }
        if far_idx == usize::MAX {
            // Every cluster is a singleton; nothing can donate.
            return;
        }
        assignments[far_idx] = empty;
        let row: Vec<T> = points.row(far_idx).to_vec();
        centroids.row_mut(empty).copy_from_slice(&row);
    }
}

fn update_centroids<T: Real>(
    points: &Matrix<T>,
    assignments: &[usize],
    centroids: &mut Matrix<T>,
    k: usize,
) {
    let dim = points.cols();
    let mut sums = vec![T::zero(); k * dim];
    let mut counts = vec![0usize; k];
    for (row, &a) in points.iter_rows().zip(assignments) {
        counts[a] += 1;
        for (s, &v) in sums[a * dim..(a + 1) * dim].iter_mut().zip(row) {
            *s += v;
        }
    }
    for c in 0..k {
        if counts[c] == 0 {
            continue;
        }
        let inv = T::one() / T::from_f64_lossy(counts[c] as f64);
        for (dst, &s) in centroids
            .row_mut(c)
            .iter_mut()
            .zip(&sums[c * dim..(c + 1) * dim])
        {
            *dst = s * inv;
        }
    }
}

fn total_inertia<T: Real>(points: &Matrix<T>, centroids: &Matrix<T>, assignments: &[usize]) -> T {
    points
        .iter_rows()
        .zip(assignments)
        .map(|(row, &a)| sq_dist(row, centroids.row(a)))
        .sum()
}
