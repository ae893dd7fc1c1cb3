use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::weighted_choice;
use crate::error::{Error, Result};
use crate::linalg::{binomial, FockPattern, Unitary};

/// How the weight of the favoured block in the adversarial mixture is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaChoice {
    /// `1 - k (m - K) / m`, clamped to `[0, 1]`.
    #[default]
    LeadingOrder,
    /// Haar-averaged ideal probability that all `k` photons land in the first
    /// `K` modes: `C(K + k - 1, k) / C(m + k - 1, k)`.
    HaarExact,
    Fixed {
        value: f64,
    },
}

impl AlphaChoice {
    /// Weight for `k` detected photons, `m` modes and block size `block`.
    pub fn resolve(&self, m: usize, k: usize, block: usize) -> Result<f64> {
        adversarial_alpha(*self, m, k, block)
    }
}

/// See [`AlphaChoice`].
pub fn adversarial_alpha(choice: AlphaChoice, m: usize, k: usize, block: usize) -> Result<f64> {
    if block > m {
        return Err(Error::InvalidInput(format!("block size {block} exceeds {m} modes")));
    }
    Ok(match choice {
        AlphaChoice::LeadingOrder => (1.0 - (k * (m - block)) as f64 / m as f64).clamp(0.0, 1.0),
        AlphaChoice::HaarExact => (0..k).map(|i| (block + i) as f64 / (m + i) as f64).product(),
        AlphaChoice::Fixed { value } => {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidInput(format!("alpha = {value} is outside [0, 1]")));
            }
            value
        }
    })
}

/// Mean-field "simulated bosons" for photons in modes `0..n`.
///
/// Each sample draws fresh phases `theta_k`, forms the single-particle
/// distribution `q(j) = |sum_k U[(j, k)] e^{i theta_k}|^2 / n` and places `n`
/// photons independently according to `q`.
pub fn sample_meanfield<R: Rng + ?Sized>(u: &Unitary, n: usize, rng: &mut R) -> Result<FockPattern> {
    if n > u.dim() {
        return Err(Error::InvalidInput(format!(
            "{n} photons do not fit in {} modes",
            u.dim()
        )));
    }
    let inputs: Vec<usize> = (0..n).collect();
    meanfield_from(u, &inputs, rng)
}

pub(super) fn meanfield_from<R: Rng + ?Sized>(u: &Unitary, inputs: &[usize], rng: &mut R) -> Result<FockPattern> {
    let m = u.dim();
    let mut out = FockPattern::vacuum(m);
    if inputs.is_empty() {
        return Ok(out);
    }
    let phases: Vec<Complex64> = inputs
        .iter()
        .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    let a = u.matrix();
    let q: Vec<f64> = (0..m)
        .map(|j| {
            inputs
                .iter()
                .zip(&phases)
                .map(|(&k, &p)| a[(j, k)] * p)
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect();
    for _ in inputs {
        out.add_photon(weighted_choice(&q, rng)?);
    }
    Ok(out)
}

/// Uniform over the `C(m, n)` collision-free patterns.
pub fn sample_uniform_cf<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<FockPattern> {
    if n > m {
        return Err(Error::InvalidInput(format!("{n} photons do not fit in {m} modes")));
    }
    let modes = index::sample(rng, m, n).into_vec();
    FockPattern::from_modes(m, &modes)
}

/// Adversarial mixture: with probability `alpha` uniform over collision-free
/// patterns inside the first `block` modes, otherwise uniform over the
/// collision-free patterns with at least one photon outside them.
pub fn sample_dad<R: Rng + ?Sized>(m: usize, n: usize, block: usize, alpha: f64, rng: &mut R) -> Result<FockPattern> {
    if block < n || block > m {
        return Err(Error::InvalidInput(format!(
            "block size K = {block} outside [{n}, {m}]"
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidInput(format!("alpha = {alpha} is outside [0, 1]")));
    }
    let tail = m - block;
    if n == 0 {
        return Ok(FockPattern::vacuum(m));
    }
    if tail == 0 && alpha < 1.0 {
        return Err(Error::InvalidInput("outer block is empty but alpha < 1".into()));
    }
    if rng.random_bool(alpha) {
        let modes = index::sample(rng, block, n).into_vec();
        return FockPattern::from_modes(m, &modes);
    }
    let weights: Vec<f64> = (0..=n.min(tail))
        .map(|j| {
            if j == 0 {
                0.0
            } else {
                binomial(tail, j) as f64 * binomial(block, n - j) as f64
            }
        })
        .collect();
    let outside = weighted_choice(&weights, rng)?;
    let mut modes = index::sample(rng, block, n - outside).into_vec();
    modes.extend(index::sample(rng, tail, outside).into_iter().map(|j| block + j));
    FockPattern::from_modes(m, &modes)
}
