use serde::{Deserialize, Serialize};

use super::campaign::{run_campaign_with, CampaignResult, RunOptions};
use super::plan::ExperimentPlan;
use crate::error::{Error, Result};
use crate::stats::{Outcome, TestId, Thresholds};

/// A test that did not pass in a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailingTest {
    pub n: usize,
    pub test: TestId,
    pub sector: Option<usize>,
    pub outcome: Outcome,
}

/// Summary of one campaign in a quality-factor scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PqfEntry {
    pub n: usize,
    pub m: usize,
    pub passed: bool,
    pub verdicts: usize,
    pub failures: Vec<FailingTest>,
}

/// Largest `n` whose campaign passes every test.
///
/// `pqf` is `None` when no campaign passes, with `reason` saying why. A noiseless
/// device passes at every `n`, so its value is bounded only by the scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PqfReport {
    pub pqf: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub entries: Vec<PqfEntry>,
    /// Failing `n` below the reported value.
    pub gaps: Vec<usize>,
    pub thresholds: Thresholds,
}

impl PqfReport {
    pub fn failures(&self) -> impl Iterator<Item = &FailingTest> {
        self.entries.iter().flat_map(|e| &e.failures)
    }

    pub fn is_monotone(&self) -> bool {
        self.gaps.is_empty()
    }
}

/// Aggregate campaigns run at different `n` with common thresholds.
pub fn evaluate_pqf(results: &[CampaignResult]) -> Result<PqfReport> {
    let first = results
        .first()
        .ok_or_else(|| Error::InvalidInput("no campaigns to evaluate".into()))?;
    let thresholds = first.plan.thresholds;
    let mut sorted: Vec<&CampaignResult> = results.iter().collect();
    sorted.sort_by_key(|r| r.plan.n);
    for pair in sorted.windows(2) {
        if pair[0].plan.n == pair[1].plan.n {
            return Err(Error::InvalidInput(format!(
                "two campaigns with n = {}",
                pair[0].plan.n
            )));
        }
    }
    if let Some(r) = sorted.iter().find(|r| r.plan.thresholds != thresholds) {
        return Err(Error::InvalidInput(format!(
            "campaign n = {} uses different thresholds",
            r.plan.n
        )));
    }

    let entries: Vec<PqfEntry> = sorted
        .iter()
        .map(|r| {
            let n = r.plan.n;
            let failures = r
                .failures()
                .map(|v| FailingTest {
                    n,
                    test: v.test,
                    sector: v.sector,
                    outcome: v.outcome(),
                })
                .collect::<Vec<_>>();
            PqfEntry {
                n,
                m: r.m,
                passed: failures.is_empty(),
                verdicts: r.verdicts.len(),
                failures,
            }
        })
        .collect();

    let pqf = entries.iter().rev().find(|e| e.passed).map(|e| e.n);
    let gaps = match pqf {
        Some(best) => entries
            .iter()
            .filter(|e| !e.passed && e.n < best)
            .map(|e| e.n)
            .collect(),
        None => Vec::new(),
    };
    let reason = match pqf {
        None => Some(format!(
            "no campaign passes all tests (n = {})",
            entries.iter().map(|e| e.n.to_string()).collect::<Vec<_>>().join(", ")
        )),
        Some(_) if !gaps.is_empty() => Some(format!("non-monotone: failing n below the maximum {gaps:?}")),
        Some(_) => None,
    };
    Ok(PqfReport {
        pqf,
        reason,
        entries,
        gaps,
        thresholds,
    })
}

/// Run every plan in turn and aggregate.
pub fn run_pqf(plans: &[ExperimentPlan], opts: &RunOptions) -> Result<PqfReport> {
    let results = plans
        .iter()
        .map(|p| run_campaign_with(p, opts))
        .collect::<Result<Vec<_>>>()?;
    evaluate_pqf(&results)
}
