use serde::{Deserialize, Serialize};

use super::correlators::CDataSet;
use super::verdict::{TestId, TestVerdict, Thresholds};
use crate::error::{Error, Result};
use crate::numeric;
use crate::samplers::Species;

/// Normalised mean, coefficient of variation and skewness of a C-dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTriple {
    pub nm: f64,
    pub cv: f64,
    pub s: f64,
}

impl MomentTriple {
    pub fn get(&self, test: TestId) -> f64 {
        match test {
            TestId::TD1 => self.nm,
            TestId::TD2 => self.cv,
            TestId::TD3 => self.s,
            other => panic!("{other} is not a moment test"),
        }
    }
}

/// Raw moments `E_U mean_pairs C^k`, `k = 1, 2, 3`, pooled over unitaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PooledMoments {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl PooledMoments {
    /// Average per-unitary raw moments `[m1, m2, m3]`.
    pub fn from_raw(per_unitary: &[[f64; 3]]) -> Result<Self> {
        if per_unitary.is_empty() {
            return Err(Error::InsufficientData("no unitaries to average".into()));
        }
        let col = |k: usize| numeric::mean(per_unitary.iter().map(|r| r[k])).expect("non-empty");
        Ok(Self {
            m1: col(0),
            m2: col(1),
            m3: col(2),
        })
    }

    pub fn variance(&self) -> f64 {
        (self.m2 - self.m1 * self.m1).max(0.0)
    }

    fn zero_variance(&self) -> bool {
        self.variance() <= 1e-12 * self.m2.abs()
    }

    /// `m^2 / n_eff * E[C]`.
    pub fn nm(&self, n_eff: usize, m: usize) -> f64 {
        (m * m) as f64 / n_eff as f64 * self.m1
    }

    /// `sqrt(Var C) / E[C]`.
    pub fn cv(&self) -> Result<f64> {
        if self.m1 == 0.0 {
            return Err(Error::UndefinedMoment("coefficient of variation"));
        }
        if self.zero_variance() {
            return Ok(0.0);
        }
        Ok(self.variance().sqrt() / self.m1)
    }

    /// Standardised third central moment.
    pub fn skewness(&self) -> Result<f64> {
        if self.zero_variance() {
            return Err(Error::UndefinedMoment("skewness"));
        }
        let central = self.m3 - 3.0 * self.m2 * self.m1 + 2.0 * self.m1.powi(3);
        Ok(central / self.variance().powf(1.5))
    }

    pub fn triple(&self, n_eff: usize, m: usize) -> Result<MomentTriple> {
        Ok(MomentTriple {
            nm: self.nm(n_eff, m),
            cv: self.cv()?,
            s: self.skewness()?,
        })
    }
}

/// NM, CV and S of the Haar-averaged C-dataset.
///
/// Moments of `C_ij` are taken over all pairs and all unitaries jointly, which
/// is the Haar average of the per-unitary moments.
pub fn haar_average_moments(datasets: &[CDataSet], n_eff: usize, m: usize) -> Result<MomentTriple> {
    if n_eff < 2 {
        return Err(Error::InvalidInput(format!("moments need n_eff >= 2, got {n_eff}")));
    }
    if let Some(d) = datasets.iter().find(|d| d.m != m) {
        return Err(Error::Shape(format!("dataset has {} modes, expected {m}", d.m)));
    }
    let raw: Vec<[f64; 3]> = datasets.iter().map(CDataSet::raw_moments).collect();
    PooledMoments::from_raw(&raw)?.triple(n_eff, m)
}

/// Leading-order Haar-averaged moments for ideal bosons (`Ideal`),
/// distinguishable particles and mean-field samplers.
pub fn theory_moments(species: Species, n_eff: usize) -> Result<MomentTriple> {
    theory_moments_with(species, n_eff, 0.0)
}

/// As [`theory_moments`], with `NM_id = -1 - nm_correction / n_eff`.
pub fn theory_moments_with(species: Species, n_eff: usize, nm_correction: f64) -> Result<MomentTriple> {
    if n_eff < 2 {
        return Err(Error::InvalidInput(format!("moments need n_eff >= 2, got {n_eff}")));
    }
    let n = n_eff as f64;
    Ok(match species {
        Species::Ideal => MomentTriple {
            nm: -1.0 - nm_correction / n,
            cv: 2.0 / n - 1.0,
            s: 2.0 - 30.0 / n,
        },
        Species::Distinguishable => MomentTriple {
            nm: 1.0,
            cv: -(3.0 / n).sqrt(),
            s: -(26.0 / 27f64.sqrt()) * (1.0 / n).sqrt(),
        },
        Species::MeanField => MomentTriple {
            nm: -1.0,
            cv: 1.0 / (2.0 * n) - 1.0,
            s: 2.0 - 21.0 / n,
        },
        other => return Err(Error::Unsupported(format!("no moment theory for {other}"))),
    })
}

/// Standard errors for each moment, in `[nm, cv, s]` order.
pub type MomentErrors = [Option<f64>; 3];

/// `t_d1`, `t_d2`, `t_d3` verdicts for one sector.
pub fn test_moments(
    measured: &MomentTriple,
    reference: &MomentTriple,
    sector: usize,
    n: usize,
    errors: MomentErrors,
    th: &Thresholds,
) -> [TestVerdict; 3] {
    let mut k = 0;
    TestId::MOMENTS.map(|test| {
        let v = TestVerdict::compare(
            test,
            sector,
            measured.get(test),
            reference.get(test),
            th.bound(test, n),
            errors[k],
        );
        k += 1;
        v
    })
}
