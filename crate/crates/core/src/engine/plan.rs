use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::Source;
use crate::stats::{default_block, ReferenceConfig, Thresholds};

/// Settings of the analysis stage that are not thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Confidence of the loss window.
    pub confidence: f64,
    /// Minimum mean number of records per unitary for a sector to be decided.
    pub min_records: u64,
    pub bootstrap_resamples: usize,
    pub references: ReferenceConfig,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            confidence: 0.99,
            min_records: 500,
            bootstrap_resamples: crate::stats::bootstrap::DEFAULT_RESAMPLES,
            references: ReferenceConfig::default(),
        }
    }
}

/// One campaign: `unitaries` Haar interferometers, `runs_per_unitary` records
/// each, `n` input photons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub n: usize,
    /// Mode count; `ceil(n^(2 + gamma))` when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<usize>,
    /// Bunching block size `K`; `m - n + 1` when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
    pub runs_per_unitary: u64,
    pub unitaries: usize,
    pub seed: u64,
    #[serde(default)]
    pub thresholds: Thresholds,
    pub source: Source,
    #[serde(default)]
    pub analysis: AnalysisOptions,
}

impl ExperimentPlan {
    pub fn new(n: usize, runs_per_unitary: u64, unitaries: usize, seed: u64, source: Source) -> Self {
        Self {
            n,
            modes: None,
            block: None,
            runs_per_unitary,
            unitaries,
            seed,
            thresholds: Thresholds::default(),
            source,
            analysis: AnalysisOptions::default(),
        }
    }

    pub fn gamma(&self) -> f64 {
        self.thresholds.gamma
    }

    pub fn m(&self) -> usize {
        self.modes.unwrap_or_else(|| modes_for(self.n, self.gamma()))
    }

    pub fn block(&self) -> usize {
        self.block.unwrap_or_else(|| default_block(self.m(), self.n))
    }

    pub fn validate(&self) -> Result<()> {
        self.thresholds.validate()?;
        let (n, m) = (self.n, self.m());
        if n < 2 {
            return Err(Error::InvalidInput(format!("campaigns need n >= 2, got {n}")));
        }
        if m <= n * n {
            return Err(Error::InvalidInput(format!("need m > n^2, got m = {m} for n = {n}")));
        }
        if self.runs_per_unitary == 0 || self.unitaries == 0 {
            return Err(Error::InvalidInput(
                "runs per unitary and unitary count must be >= 1".into(),
            ));
        }
        let block = self.block();
        if block < n || block > m {
            return Err(Error::InvalidInput(format!(
                "block size K = {block} outside [{n}, {m}]"
            )));
        }
        let a = &self.analysis;
        if !(a.confidence > 0.0 && a.confidence < 1.0) {
            return Err(Error::InvalidInput(format!(
                "confidence {} must lie in (0, 1)",
                a.confidence
            )));
        }
        Ok(())
    }
}

/// `ceil(n^(2 + gamma))`, ignoring rounding noise below `1e-9`.
pub fn modes_for(n: usize, gamma: f64) -> usize {
    ((n as f64).powf(2.0 + gamma) - 1e-9).ceil() as usize
}
