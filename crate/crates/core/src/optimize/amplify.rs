use crate::{Error, Result};

/// Probability that more than half of `k` independent runs succeed when
/// each succeeds with probability `p`, by direct summation of the binomial
/// tail in log space.
pub fn majority_amplify(p: f64, k: usize) -> Result<f64> {
    if k.is_multiple_of(2) {
        return Err(Error::Validation(format!("majority vote needs an odd count, got {k}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Validation(format!("p must lie in [0, 1], got {p}")));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(p);
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    // ln C(k, j), built up from ln C(k, 0) = 0.
    let mut log_binom = vec![0.0f64; k + 1];
    for j in 1..=k {
        log_binom[j] = log_binom[j - 1] + ((k - j + 1) as f64).ln() - (j as f64).ln();
    }
    let total: f64 = (k / 2 + 1..=k)
        .map(|j| (log_binom[j] + j as f64 * lp + (k - j) as f64 * lq).exp())
        .sum();
    Ok(total.clamp(0.0, 1.0))
}
