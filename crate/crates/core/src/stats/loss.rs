use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;
use crate::samplers::ClickRecord;

/// Per-unitary and pooled loss estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossEstimate {
    pub per_unitary: Vec<f64>,
    pub pooled: f64,
}

/// Closed interval of loss sectors `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossWindow {
    pub lo: usize,
    pub hi: usize,
}

impl LossWindow {
    pub fn contains(&self, l: usize) -> bool {
        (self.lo..=self.hi).contains(&l)
    }

    pub fn sectors(&self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

/// Histogram of loss sectors `0..=n` for each unitary.
pub fn loss_histograms(groups: &[Vec<ClickRecord>], n: usize) -> Result<Vec<Vec<u64>>> {
    groups
        .iter()
        .map(|records| {
            let mut h = vec![0u64; n + 1];
            for r in records {
                if r.lost > n {
                    return Err(Error::InvalidInput(format!("record lost {} of {n} photons", r.lost)));
                }
                h[r.lost] += 1;
            }
            Ok(h)
        })
        .collect()
}

/// Mean lost fraction per unitary, then the mean over unitaries.
pub fn estimate_loss(groups: &[Vec<ClickRecord>], n: usize) -> Result<LossEstimate> {
    estimate_loss_from_histograms(&loss_histograms(groups, n)?, n, None)
}

/// As [`estimate_loss`] from sector histograms.
///
/// With `window` set, the histograms are taken to cover only that window and
/// each per-unitary value is the maximum-likelihood fit of a binomial
/// truncated to it.
pub fn estimate_loss_from_histograms(
    histograms: &[Vec<u64>],
    n: usize,
    window: Option<LossWindow>,
) -> Result<LossEstimate> {
    if n == 0 {
        return Err(Error::InvalidInput("loss estimation needs n >= 1".into()));
    }
    let mut per_unitary = Vec::with_capacity(histograms.len());
    for h in histograms {
        if h.len() != n + 1 {
            return Err(Error::Shape(format!(
                "histogram has {} bins, expected {}",
                h.len(),
                n + 1
            )));
        }
        let total: u64 = h.iter().sum();
        if total == 0 {
            continue;
        }
        let value = match window {
            Some(w) if (w.lo, w.hi) != (0, n) => fit_truncated_binomial(h, n, w),
            _ => {
                let lost: f64 = numeric::sum(h.iter().enumerate().map(|(l, &c)| (l as u64 * c) as f64));
                lost / (total as f64 * n as f64)
            }
        };
        per_unitary.push(value);
    }
    let pooled =
        numeric::mean(per_unitary.iter().copied()).ok_or_else(|| Error::InsufficientData("no click records".into()))?;
    Ok(LossEstimate { per_unitary, pooled })
}

fn fit_truncated_binomial(h: &[u64], n: usize, w: LossWindow) -> f64 {
    let ln_choose: Vec<f64> = (0..=n)
        .map(|l| ln_factorial(n) - ln_factorial(l) - ln_factorial(n - l))
        .collect();
    let log_lik = |lambda: f64| {
        let (ln_l, ln_k) = (lambda.ln(), (1.0 - lambda).ln());
        let log_term = |l: usize| ln_choose[l] + l as f64 * ln_l + (n - l) as f64 * ln_k;
        let norm_max = w.sectors().map(log_term).fold(f64::NEG_INFINITY, f64::max);
        let ln_norm = norm_max + w.sectors().map(|l| (log_term(l) - norm_max).exp()).sum::<f64>().ln();
        w.sectors()
            .filter(|&l| h[l] > 0)
            .map(|l| h[l] as f64 * (log_term(l) - ln_norm))
            .sum::<f64>()
    };
    // Golden-section search; the truncated log-likelihood is unimodal in lambda.
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1e-12, 1.0 - 1e-12);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (log_lik(c), log_lik(d));
    for _ in 0..200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = log_lik(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = log_lik(d);
        }
    }
    (a + b) / 2.0
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Sectors expected to hold nearly all records:
/// `[ceil(lambda n) - l0, ceil(lambda n) + l0]` clamped to `[0, n]`, with
/// `l0 = ceil(sqrt(3 lambda n ln(2 / (1 - confidence))))`.
pub fn loss_window(lambda_hat: f64, n: usize, confidence: f64) -> Result<LossWindow> {
    if !(0.0..=1.0).contains(&lambda_hat) {
        return Err(Error::InvalidInput(format!("lambda = {lambda_hat} is outside [0, 1]")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidInput(format!(
            "confidence = {confidence} must lie in (0, 1)"
        )));
    }
    let mean = lambda_hat * n as f64;
    let center = ((mean - 1e-9).ceil().max(0.0) as usize).min(n);
    let half = (3.0 * mean * (2.0 / (1.0 - confidence)).ln()).sqrt().ceil() as usize;
    Ok(LossWindow {
        lo: center.saturating_sub(half),
        hi: (center + half).min(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FockPattern;

    fn records(lost: &[usize], n: usize) -> Vec<ClickRecord> {
        lost.iter()
            .map(|&l| ClickRecord::new(0, FockPattern::canonical(n + 1, n - l).unwrap(), n).unwrap())
            .collect()
    }

    #[test]
    fn extremes() {
        assert_eq!(estimate_loss(&[records(&[0, 0, 0], 3)], 3).unwrap().pooled, 0.0);
        assert_eq!(estimate_loss(&[records(&[3, 3], 3)], 3).unwrap().pooled, 1.0);
        assert!(matches!(estimate_loss(&[], 3), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn pooled_is_mean_over_unitaries() {
        let est = estimate_loss(&[records(&[0, 2], 4), records(&[4], 4)], 4).unwrap();
        assert_eq!(est.per_unitary, vec![0.25, 1.0]);
        assert_eq!(est.pooled, 0.625);
    }

    #[test]
    fn windows() {
        assert_eq!(loss_window(0.0, 10, 0.99).unwrap(), LossWindow { lo: 0, hi: 0 });
        let w = loss_window(0.5, 100, 0.99).unwrap();
        assert_eq!(w, LossWindow { lo: 21, hi: 79 });
        let w = loss_window(0.9, 5, 0.999).unwrap();
        assert_eq!(w.hi, 5);
        assert!(loss_window(0.1, 10, 1.0).is_err());
    }

    #[test]
    fn truncated_fit_recovers_lambda() {
        // Exact binomial(20, 0.3) weights restricted to sectors 3..=9.
        let n = 20;
        let lambda: f64 = 0.3;
        let w = LossWindow { lo: 3, hi: 9 };
        let mut h = vec![0u64; n + 1];
        for l in w.sectors() {
            let p = (ln_factorial(n) - ln_factorial(l) - ln_factorial(n - l)
                + l as f64 * lambda.ln()
                + (n - l) as f64 * (1.0 - lambda).ln())
            .exp();
            h[l] = (p * 1e9).round() as u64;
        }
        let est = estimate_loss_from_histograms(&[h], n, Some(w)).unwrap();
        assert!((est.pooled - 0.3).abs() < 1e-6, "{}", est.pooled);
    }
}
