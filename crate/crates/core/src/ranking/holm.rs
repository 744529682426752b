use super::RankError;

/// Holm step-down adjustment, returned in the input order.
///
/// With the p-values sorted ascending, the i-th (1-based) is scaled by
/// `m - i + 1`, a running maximum enforces monotonicity, and everything caps
/// at 1.
pub fn holm_adjust(raw: &[f64]) -> Result<Vec<f64>, RankError> {
    for &p in raw {
        if !(0.0..=1.0).contains(&p) {
            return Err(RankError::Domain(format!(
                "p-values must be in [0, 1], got {p}"
            )));
        }
    }
    let m = raw.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));
    let mut adjusted = vec![0.0; m];
    let mut running_max = 0.0f64;
    for (i, &idx) in order.iter().enumerate() {
        let scaled = raw[idx] * (m - i) as f64;
        running_max = running_max.max(scaled).min(1.0);
        adjusted[idx] = running_max;
    }
    Ok(adjusted)
}
