use super::correlators::SectorCounts;
use super::verdict::{TestId, TestVerdict, Thresholds};
use crate::error::{Error, Result};
use crate::numeric;

/// Default block size `K = m - n + 1`.
pub fn default_block(m: usize, n: usize) -> usize {
    m + 1 - n.max(1)
}

/// Per-unitary fraction of records confined to the block and its mean over
/// unitaries. Unitaries with no records in the sector are skipped.
pub fn estimate_bunching<'a>(per_unitary: impl IntoIterator<Item = &'a SectorCounts>) -> Result<(Vec<f64>, f64)> {
    let fractions: Vec<f64> = per_unitary
        .into_iter()
        .filter_map(SectorCounts::bunching_fraction)
        .collect();
    let mean = numeric::mean(fractions.iter().copied())
        .ok_or_else(|| Error::InsufficientData("no records for bunching estimate".into()))?;
    Ok((fractions, mean))
}

/// Leading-order Haar-averaged ideal value `1 - c n_eff (m - K) / m`.
pub fn theory_bunching_id(n_eff: usize, m: usize, block: usize, constant: f64) -> f64 {
    1.0 - constant * (n_eff * (m - block)) as f64 / m as f64
}

/// Exact Haar average `C(K + n_eff - 1, n_eff) / C(m + n_eff - 1, n_eff)` of
/// the ideal probability that all photons land in the first `K` modes.
pub fn haar_bunching_exact(n_eff: usize, m: usize, block: usize) -> f64 {
    (0..n_eff).map(|i| (block + i) as f64 / (m + i) as f64).product()
}

/// Change of the bunching probability caused by partial distinguishability:
/// `(1 - x^2) (n_eff - 1) n_eff / m * p_next`.
pub fn theory_bunching_shift(x: f64, n_eff: usize, m: usize, p_next: f64) -> f64 {
    (1.0 - x * x) * (n_eff.saturating_sub(1) * n_eff) as f64 / m as f64 * p_next
}

/// `t_d4` verdict for one sector.
pub fn test_bunching(
    measured: f64,
    reference: f64,
    sector: usize,
    n: usize,
    std_error: Option<f64>,
    th: &Thresholds,
) -> TestVerdict {
    TestVerdict::compare(
        TestId::TD4,
        sector,
        measured,
        reference,
        th.bunching_bound(n),
        std_error,
    )
}
