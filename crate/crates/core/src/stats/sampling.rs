use crate::error::{Error, Result};

/// Smallest `L` with `1 - sigma2 / (L eps^2) >= confidence`.
///
/// Starts from `ceil(sigma2 / ((1 - confidence) eps^2))` and corrects for
/// rounding so that `L` satisfies the inequality and `L - 1` does not.
pub fn chebyshev_sample_size(epsilon: f64, confidence: f64, sigma2: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("precision {epsilon} must be positive")));
    }
    if !(0.0..1.0).contains(&confidence) {
        return Err(Error::InvalidInput(format!(
            "confidence {confidence} must lie in [0, 1)"
        )));
    }
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "variance bound {sigma2} must be non-negative"
        )));
    }
    if sigma2 == 0.0 {
        return Ok(1);
    }
    let ok = |l: u64| sigma2 <= (1.0 - confidence) * l as f64 * epsilon * epsilon;
    let estimate = (sigma2 / ((1.0 - confidence) * epsilon * epsilon)).ceil();
    if estimate >= u64::MAX as f64 {
        return Err(Error::InvalidInput("sample size overflows".into()));
    }
    let mut l = (estimate as u64).max(1);
    while !ok(l) {
        l += 1;
    }
    while l > 1 && ok(l - 1) {
        l -= 1;
    }
    Ok(l)
}
