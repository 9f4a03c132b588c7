use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::protocol::MeasurementFamily;
use crate::rng::stream;
use crate::{Error, Result};

use super::{exact_classical_response_value, uniform_weights};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsampleTrial {
    pub trial: usize,
    /// Optimal value under the empirical challenge distribution.
    pub rhs: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsampleReport {
    /// Length of the challenge strings.
    pub m: usize,
    pub r: usize,
    pub eps: f64,
    pub seed: u64,
    /// Optimal value under uniform challenges.
    pub lhs: f64,
    pub trials: Vec<SubsampleTrial>,
    /// Fraction of trials whose deviation exceeds `eps`.
    pub failure_fraction: f64,
}

impl SubsampleReport {
    pub fn mean_deviation(&self) -> f64 {
        self.trials.iter().map(|t| t.deviation).sum::<f64>() / self.trials.len() as f64
    }

    /// Standard error of the mean deviation.
    pub fn standard_error(&self) -> f64 {
        let n = self.trials.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let mean = self.mean_deviation();
        let var = self
            .trials
            .iter()
            .map(|t| (t.deviation - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        (var / n).sqrt()
    }
}

/// |value(uniform) − value(empirical distribution of `sample`)| for a
/// multiset of challenge indices.
pub fn subsample_deviation(fam: &MeasurementFamily, sample: &[usize]) -> Result<f64> {
    let ny = fam.challenges().len();
    let lhs = exact_classical_response_value(fam, &uniform_weights(ny))?.value;
    Ok((lhs - empirical_value(fam, sample)?).abs())
}

fn empirical_value(fam: &MeasurementFamily, sample: &[usize]) -> Result<f64> {
    let ny = fam.challenges().len();
    if sample.is_empty() {
        return Err(Error::Validation("sample must be nonempty".into()));
    }
    let mut counts = vec![0usize; ny];
    for &y in sample {
        *counts.get_mut(y).ok_or_else(|| {
            Error::Validation(format!("challenge index {y} outside the family"))
        })? += 1;
    }
    let weights: Vec<f64> = counts.iter().map(|&c| c as f64 / sample.len() as f64).collect();
    Ok(exact_classical_response_value(fam, &weights)?.value)
}

/// Draws `r` challenges uniformly with replacement in each trial (trial `t`
/// uses stream `t` of `seed`) and records how far the optimal value under
/// the empirical distribution lies from the value under uniform challenges.
pub fn subsampling_experiment(
    fam: &MeasurementFamily,
    r: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<SubsampleReport> {
    if r == 0 || trials == 0 {
        return Err(Error::Validation("r and trials must be at least 1".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Validation(format!("eps must be positive, got {eps}")));
    }
    let ny = fam.challenges().len();
    let lhs = exact_classical_response_value(fam, &uniform_weights(ny))?.value;
    let records = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream(seed, trial as u64);
            let sample: Vec<usize> = (0..r).map(|_| rng.random_range(0..ny)).collect();
            let rhs = empirical_value(fam, &sample)?;
            Ok(SubsampleTrial {
                trial,
                rhs,
                deviation: (lhs - rhs).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = records.iter().filter(|t| t.deviation > eps).count();
    Ok(SubsampleReport {
        m: fam.challenges()[0].chars().count(),
        r,
        eps,
        seed,
        lhs,
        failure_fraction: failures as f64 / trials as f64,
        trials: records,
    })
}
