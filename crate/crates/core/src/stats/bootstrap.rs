use rand::Rng;

use crate::numeric;
use crate::rng::{self, Purpose};

/// Default number of bootstrap resamples.
pub const DEFAULT_RESAMPLES: usize = 200;

/// Standard error of `statistic` by resampling `items` with replacement.
///
/// Returns `None` with fewer than two items or when fewer than two resamples
/// yield a finite statistic. The stream is fixed by `(seed, tag)`.
pub fn bootstrap_std_error<T>(
    items: &[T],
    resamples: usize,
    seed: u64,
    tag: u64,
    statistic: impl Fn(&[&T]) -> Option<f64>,
) -> Option<f64> {
    if items.len() < 2 {
        return None;
    }
    let mut rng = rng::stream(seed, Purpose::Bootstrap, tag, 0);
    let mut draw: Vec<&T> = Vec::with_capacity(items.len());
    let mut values = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        draw.clear();
        draw.extend((0..items.len()).map(|_| &items[rng.random_range(0..items.len())]));
        if let Some(v) = statistic(&draw).filter(|v| v.is_finite()) {
            values.push(v);
        }
    }
    if values.len() < 2 {
        return None;
    }
    let mean = numeric::mean(values.iter().copied())?;
    let var = numeric::sum(values.iter().map(|v| (v - mean).powi(2))) / (values.len() - 1) as f64;
    Some(var.sqrt())
}

/// Mean of plain values, for use as a bootstrap statistic.
pub fn mean_of(values: &[&f64]) -> Option<f64> {
    numeric::mean(values.iter().map(|&&v| v))
}
