use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometric series `sum_{k=0}^{n} x^k` against its first-order expansion in
/// `1 - x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesGap {
    /// `(1 - x^{n+1}) / (1 - x)`.
    pub exact: f64,
    /// `n + 1 - n (n + 1) (1 - x) / 2`.
    pub approx: f64,
    /// `exact - approx`.
    pub kappa: f64,
    /// `n (n + 1) (1 - x) / 2`, the scale `kappa` is compared with.
    pub scale: f64,
}

impl SeriesGap {
    /// `|kappa| / scale`.
    pub fn ratio(&self) -> f64 {
        self.kappa.abs() / self.scale
    }
}

pub fn lemma_series_gap(x: f64, n: u64) -> Result<SeriesGap> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::InvalidInput(format!("x = {x} must lie in [0, 1)")));
    }
    let beta = 1.0 - x;
    let terms = (n + 1) as f64;
    // 1 - x^{n+1} = -expm1((n + 1) ln(1 - beta)), accurate for tiny beta.
    let exact = -((terms * (-beta).ln_1p()).exp_m1()) / beta;
    let scale = n as f64 * terms * beta / 2.0;
    let approx = terms - scale;
    Ok(SeriesGap {
        exact,
        approx,
        kappa: exact - approx,
        scale,
    })
}
