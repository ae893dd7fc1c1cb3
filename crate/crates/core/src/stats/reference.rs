//! Reference values the measured statistics are compared with.
//!
//! For small `n` the references are exact Haar averages: the bunching
//! probability has a closed form, and the correlator moments are Monte-Carlo
//! averages over Haar unitaries of exact per-unitary ideal correlators. Above
//! a cutoff the leading-order closed forms are used.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bunching::{haar_bunching_exact, theory_bunching_id};
use super::correlators::CDataSet;
use super::moments::{theory_moments_with, MomentTriple, PooledMoments};
use crate::error::{Error, Result};
use crate::linalg::{haar_random_columns, ComplexMatrix};
use crate::rng::{self, Purpose};
use crate::samplers::Species;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceConfig {
    /// Largest `n` for which Haar-exact references are computed.
    pub exact_up_to: usize,
    /// Haar unitaries averaged for the correlator-moment references.
    pub unitaries: usize,
    /// Seed of the reference unitaries, shared by all campaigns.
    pub seed: u64,
    /// Coefficient `c` in `NM_id = -1 - c / n_eff` for leading-order references.
    pub nm_correction: f64,
    /// Constant in the leading-order bunching value `1 - c n_eff (m - K) / m`.
    pub bunching_constant: f64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        Self {
            exact_up_to: 10,
            unitaries: 2000,
            seed: 0x5E_ED0F_BA5E,
            nm_correction: 0.0,
            bunching_constant: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    HaarExact,
    LeadingOrder,
}

/// Reference values for one loss sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorReference {
    pub n_eff: usize,
    pub kind: ReferenceKind,
    /// `None` when `n_eff < 2`.
    pub moments: Option<MomentTriple>,
    pub bunching: f64,
}

impl ReferenceConfig {
    pub fn kind_for(&self, n: usize) -> ReferenceKind {
        if n <= self.exact_up_to {
            ReferenceKind::HaarExact
        } else {
            ReferenceKind::LeadingOrder
        }
    }

    /// References for `n_eff` detected photons out of `n`, `m` modes and
    /// bunching block `block`.
    pub fn sector(&self, n: usize, n_eff: usize, m: usize, block: usize) -> Result<SectorReference> {
        let kind = self.kind_for(n);
        let (moments, bunching) = match kind {
            ReferenceKind::HaarExact => {
                let moments = if n_eff >= 2 {
                    Some(haar_reference_moments(n, n_eff, m, self.unitaries, self.seed)?)
                } else {
                    None
                };
                (moments, haar_bunching_exact(n_eff, m, block))
            }
            ReferenceKind::LeadingOrder => {
                let moments = if n_eff >= 2 {
                    Some(theory_moments_with(Species::Ideal, n_eff, self.nm_correction)?)
                } else {
                    None
                };
                (moments, theory_bunching_id(n_eff, m, block, self.bunching_constant))
            }
        };
        Ok(SectorReference {
            n_eff,
            kind,
            moments,
            bunching,
        })
    }
}

/// Exact ideal correlators `C_ij` for one interferometer, averaged over the
/// equally likely choices of `n_eff` surviving photons among inputs `0..n`.
///
/// `cols` holds the first `n` columns of the unitary.
pub fn ideal_correlators(cols: &ComplexMatrix, n_eff: usize) -> Result<CDataSet> {
    let (m, n) = (cols.rows(), cols.cols());
    if n_eff > n || n < 2 {
        return Err(Error::InvalidInput(format!(
            "need 2 <= n and n_eff <= n, got n={n}, n_eff={n_eff}"
        )));
    }
    let f1 = n_eff as f64 / n as f64;
    let f2 = (n_eff * n_eff.saturating_sub(1)) as f64 / (n * (n - 1)) as f64;
    let prob: Vec<f64> = cols.as_slice().iter().map(Complex64::norm_sqr).collect();
    let row_sum: Vec<f64> = prob.chunks_exact(n).map(|r| r.iter().sum()).collect();
    let mut values = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        let ri = cols.row(i);
        let pi = &prob[i * n..(i + 1) * n];
        for j in i + 1..m {
            let rj = cols.row(j);
            let pj = &prob[j * n..(j + 1) * n];
            let mut overlap = Complex64::new(0.0, 0.0);
            let mut diag = 0.0;
            for k in 0..n {
                overlap += ri[k].conj() * rj[k];
                diag += pi[k] * pj[k];
            }
            let direct = row_sum[i] * row_sum[j];
            let pair = f2 * (direct - 2.0 * diag + overlap.norm_sqr());
            values.push(pair - f1 * f1 * direct);
        }
    }
    CDataSet::new(m, n - n_eff, values)
}

type CacheKey = (usize, usize, usize, usize, u64);

fn cache() -> &'static Mutex<HashMap<CacheKey, MomentTriple>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, MomentTriple>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Haar average of the ideal correlator moments, by Monte Carlo over
/// `unitaries` draws of exact per-unitary correlators. Results are memoised
/// per process.
pub fn haar_reference_moments(n: usize, n_eff: usize, m: usize, unitaries: usize, seed: u64) -> Result<MomentTriple> {
    let key = (n, n_eff, m, unitaries, seed);
    if let Some(hit) = cache().lock().expect("reference cache").get(&key) {
        return Ok(*hit);
    }
    let value = compute_reference_moments(n, n_eff, m, unitaries, seed)?;
    cache().lock().expect("reference cache").insert(key, value);
    Ok(value)
}

fn compute_reference_moments(n: usize, n_eff: usize, m: usize, unitaries: usize, seed: u64) -> Result<MomentTriple> {
    if unitaries == 0 {
        return Err(Error::InvalidInput("reference needs at least one unitary".into()));
    }
    let raw = (0..unitaries)
        .into_par_iter()
        .map(|u| {
            let mut rng = rng::stream(seed, Purpose::Reference, u as u64, (m * 1000 + n) as u64);
            let cols = haar_random_columns(m, n, &mut rng)?;
            Ok(ideal_correlators(&cols, n_eff)?.raw_moments())
        })
        .collect::<Result<Vec<_>>>()?;
    PooledMoments::from_raw(&raw)?.triple(n_eff, m)
}
