use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MetricsError;

pub const DEFAULT_RESAMPLES: usize = 1000;
pub const MIN_RESAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Linear-interpolation percentile of sorted data, `q` in [0, 1].
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Draws `resamples` bootstrap samples of `units` (with replacement) and
/// returns the 95% percentile interval of `stat` around its full-sample value.
///
/// Resample `r` uses its own ChaCha stream derived from `seed`, so the result
/// does not depend on how rayon schedules the work.
pub fn bootstrap_ci<U, F>(units: &[U], stat: F, resamples: usize, seed: u64) -> Result<ConfidenceInterval, MetricsError>
where
    U: Sync,
    F: Fn(&[&U]) -> f64 + Sync,
{
    if units.len() < 2 {
        return Err(MetricsError::TooFewUnits(units.len()));
    }
    if resamples < MIN_RESAMPLES {
        return Err(MetricsError::InvalidResamples(resamples));
    }
    let all: Vec<&U> = units.iter().collect();
    let point = stat(&all);
    let mut values: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let sample: Vec<&U> = (0..units.len()).map(|_| &units[rng.gen_range(0..units.len())]).collect();
            stat(&sample)
        })
        .collect();
    values.sort_by(f64::total_cmp);
    let lo = percentile(&values, 0.025).min(point);
    let hi = percentile(&values, 0.975).max(point);
    Ok(ConfidenceInterval { point, lo, hi })
}
