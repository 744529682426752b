use super::ProtocolError;
use crate::numkernel::SeededRng;

/// Number of attack rows needed to reach contamination ratio `alpha` on top
/// of `n` normals: `ceil(alpha * n / (1 - alpha))`.
pub fn contamination_count(n: usize, alpha: f64) -> Result<usize, ProtocolError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(ProtocolError::Domain(format!(
            "alpha must be in [0, 1), got {alpha}"
        )));
    }
    Ok((alpha * n as f64 / (1.0 - alpha)).ceil() as usize)
}

/// Build the contaminated training-row set: all training normals plus `m`
/// rows drawn from the contamination pool, where `m = ceil(alpha*n/(1-alpha))`.
///
/// Returns the combined row indices (normals first, then the drawn pool rows)
/// and the achieved contamination `m / (n + m)`, which due to the ceiling can
/// only overshoot `alpha`, by at most `1 / (n + m)`.
pub fn contaminate(
    train_normals: &[usize],
    pool: &[usize],
    alpha: f64,
    rng: &mut SeededRng,
) -> Result<(Vec<usize>, f64), ProtocolError> {
    let n = train_normals.len();
    let m = contamination_count(n, alpha)?;
    if m > pool.len() {
        return Err(ProtocolError::InsufficientPool {
            required: m,
            available: pool.len(),
        });
    }
    let mut rows = train_normals.to_vec();
    if m > 0 {
        let chosen = rng.sample_indices(pool.len(), m);
        rows.extend(chosen.into_iter().map(|i| pool[i]));
    }
    let achieved = if n + m == 0 {
        0.0
    } else {
        m as f64 / (n + m) as f64
    };
    Ok((rows, achieved))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_zero_adds_nothing() {
        let normals: Vec<usize> = (0..1000).collect();
        let pool: Vec<usize> = (1000..1500).collect();
        let mut rng = SeededRng::new(1);
        let (rows, achieved) = contaminate(&normals, &pool, 0.0, &mut rng).unwrap();
        assert_eq!(rows, normals);
        assert_eq!(achieved, 0.0);
    }

    #[test]
    fn hand_evaluated_ceiling_counts() {
        // alpha 0.05 on 1000 normals: 50 / 0.95 = 52.63..., so 53.
        assert_eq!(contamination_count(1000, 0.05).unwrap(), 53);
        // alpha 0.12 on 950 normals: 114 / 0.88 = 129.54..., so 130.
        assert_eq!(contamination_count(950, 0.12).unwrap(), 130);
    }

    #[test]
    fn achieved_ratio_brackets_alpha() {
        let normals: Vec<usize> = (0..1000).collect();
        let pool: Vec<usize> = (1000..1200).collect();
        let mut rng = SeededRng::new(2);
        let (rows, achieved) = contaminate(&normals, &pool, 0.05, &mut rng).unwrap();
        assert_eq!(rows.len(), 1053);
        assert!((achieved - 53.0 / 1053.0).abs() < 1e-15);
        assert!(achieved >= 0.05);
        assert!(achieved <= 0.05 + 1.0 / 1053.0);
    }

    #[test]
    fn drawn_rows_come_from_the_pool_without_repeats() {
        let normals: Vec<usize> = (0..50).collect();
        let pool: Vec<usize> = (100..160).collect();
        let mut rng = SeededRng::new(3);
        let (rows, _) = contaminate(&normals, &pool, 0.2, &mut rng).unwrap();
        let added = &rows[50..];
        assert_eq!(added.len(), 13); // ceil(0.2*50/0.8) = ceil(12.5)
        let mut sorted = added.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), added.len());
        assert!(added.iter().all(|i| pool.contains(i)));
    }

    #[test]
    fn oversized_demand_reports_required_count() {
        let normals: Vec<usize> = (0..1000).collect();
        let pool: Vec<usize> = (1000..1010).collect();
        let mut rng = SeededRng::new(4);
        match contaminate(&normals, &pool, 0.12, &mut rng) {
            Err(ProtocolError::InsufficientPool {
                required,
                available,
            }) => {
                assert_eq!(required, 137); // ceil(120/0.88)
                assert_eq!(available, 10);
            }
            other => panic!("expected pool error, got {other:?}"),
        }
    }

    #[test]
    fn alpha_out_of_range_is_a_domain_error() {
        assert!(contamination_count(10, 1.0).is_err());
        assert!(contamination_count(10, -0.1).is_err());
    }
}
