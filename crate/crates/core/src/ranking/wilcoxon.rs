use statrs::distribution::{ContinuousCDF, Normal};

use super::RankError;

/// Result of one paired signed-rank comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonOutcome {
    /// min(W+, W-), the classical T statistic.
    pub statistic: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    /// Pairs remaining after zero differences are dropped.
    pub n_effective: usize,
}

/// Signed ranks of the nonzero differences `a[i] - b[i]`: average ranks of
/// |d| (ascending) carrying the sign of d.
fn signed_ranks(a: &[f64], b: &[f64]) -> Result<Vec<f64>, RankError> {
    if a.len() != b.len() {
        return Err(RankError::Domain(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(RankError::Domain("differences must be finite".into()));
    }
    let n = diffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && diffs[order[j]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        // Average rank for the tie group covering sorted positions i..j.
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg * diffs[idx].signum();
        }
        i = j;
    }
    Ok(ranks)
}

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped. Up to n = 20 the p-value is exact: all 2^n
/// sign assignments of the observed ranks are enumerated and
/// `p = P(min(W+, W-) <= observed)`. Beyond that a normal approximation with
/// tie-corrected variance and a 0.5 continuity correction is used.
/// All-zero differences return statistic 0 with p = 1.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonOutcome, RankError> {
    let ranks = signed_ranks(a, b)?;
    let n = ranks.len();
    if n == 0 {
        return Ok(WilcoxonOutcome {
            statistic: 0.0,
            p_value: 1.0,
            n_effective: 0,
        });
    }
    if n == 1 {
        return Err(RankError::Domain(
            "need at least 2 nonzero differences".into(),
        ));
    }
    let w_plus: f64 = ranks.iter().filter(|&&r| r > 0.0).sum();
    let w_minus: f64 = -ranks.iter().filter(|&&r| r < 0.0).sum::<f64>();
    let statistic = w_plus.min(w_minus);

    let p_value = if n <= 20 {
        exact_two_sided_p(&ranks, statistic)
    } else {
        normal_two_sided_p(&ranks, w_plus)
    };
    Ok(WilcoxonOutcome {
        statistic,
        p_value,
        n_effective: n,
    })
}

fn exact_two_sided_p(ranks: &[f64], observed: f64) -> f64 {
    let abs: Vec<f64> = ranks.iter().map(|r| r.abs()).collect();
    let total: f64 = abs.iter().sum();
    let n = abs.len();
    let mut extreme = 0u64;
    for mask in 0u64..(1u64 << n) {
        let mut s = 0.0;
        for (bit, &r) in abs.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                s += r;
            }
        }
        if s.min(total - s) <= observed + 1e-9 {
            extreme += 1;
        }
    }
    extreme as f64 / (1u64 << n) as f64
}

fn normal_two_sided_p(ranks: &[f64], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    // Tie correction: group the absolute ranks (equal average rank means a
    // tie group) and subtract sum(t^3 - t) / 48.
    let mut abs: Vec<f64> = ranks.iter().map(|r| r.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < abs.len() {
        let mut j = i;
        while j < abs.len() && abs[j] == abs[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let centered = w_plus - mean;
    let correction = 0.5 * centered.signum();
    let z = (centered - correction) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal is valid");
    (2.0 * normal.cdf(-z.abs())).min(1.0)
}

/// Matched-pairs rank-biserial correlation: `(W+ - W-) / (W+ + W-)` over the
/// signed ranks of nonzero differences; 0 when every difference is zero.
pub fn effect_size(a: &[f64], b: &[f64]) -> Result<f64, RankError> {
    let ranks = signed_ranks(a, b)?;
    if ranks.is_empty() {
        return Ok(0.0);
    }
    let w_plus: f64 = ranks.iter().filter(|&&r| r > 0.0).sum();
    let w_minus: f64 = -ranks.iter().filter(|&&r| r < 0.0).sum::<f64>();
    Ok((w_plus - w_minus) / (w_plus + w_minus))
}
