use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::campaign::{run_campaign_with, CampaignResult, RunOptions};
use super::plan::ExperimentPlan;
use crate::error::{Error, Result};
use crate::samplers::Species;
use crate::stats::{Outcome, TestId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesRow {
    pub species: Species,
    /// Worst outcome of each test over its sectors.
    pub cells: BTreeMap<TestId, Outcome>,
    pub campaign: CampaignResult,
}

impl SpeciesRow {
    pub fn cell(&self, test: TestId) -> Outcome {
        self.cells[&test]
    }
}

/// Species against tests for campaigns that differ only in the particle model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureMatrix {
    pub n: usize,
    pub m: usize,
    pub rows: Vec<SpeciesRow>,
}

impl FailureMatrix {
    pub fn row(&self, species: Species) -> Option<&SpeciesRow> {
        self.rows.iter().find(|r| r.species == species)
    }

    /// Plain-text table, one line per species.
    pub fn render(&self) -> String {
        let mut out = format!("{:<16}", "species");
        for t in TestId::ALL {
            out.push_str(&format!("{:>14}", t.name()));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{:<16}", row.species.name()));
            for t in TestId::ALL {
                out.push_str(&format!("{:>14}", row.cell(t).name()));
            }
            out.push('\n');
        }
        out
    }
}

/// Collapse the per-sector verdicts of a campaign to one outcome per test.
pub fn summarize(result: &CampaignResult) -> BTreeMap<TestId, Outcome> {
    TestId::ALL
        .into_iter()
        .map(|test| {
            let outcomes = result.verdicts.iter().filter(|v| v.test == test).map(|v| v.outcome());
            let cell = outcomes.fold(None, |acc: Option<Outcome>, o| Some(acc.map_or(o, |a| a.max(o))));
            (test, cell.unwrap_or(Outcome::Inconclusive))
        })
        .collect()
}

/// Run `base` once per species, keeping its seed, noise and sample sizes.
pub fn compare_species(base: &ExperimentPlan, species: &[Species], opts: &RunOptions) -> Result<FailureMatrix> {
    if species.is_empty() {
        return Err(Error::InvalidInput("no species to compare".into()));
    }
    let rows = species
        .iter()
        .map(|&s| {
            let mut plan = base.clone();
            plan.source.species = s;
            let campaign = run_campaign_with(&plan, opts)?;
            Ok(SpeciesRow {
                species: s,
                cells: summarize(&campaign),
                campaign,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FailureMatrix {
        n: base.n,
        m: base.m(),
        rows,
    })
}
