//! Campaign orchestration: simulate or ingest click records for a set of
//! Haar interferometers, decide the five tests, aggregate campaigns over `n`
//! into a quality factor and tabulate species against tests.

mod campaign;
mod compare;
mod plan;
mod pqf;

pub use campaign::{
    analyze, draw_unitary, run_campaign, run_campaign_with, simulate_records, simulate_tallies, tally_records,
    CampaignResult, RunOptions, SectorStatus, SectorSummary, SimulatedData, UnitaryTally, RECORDS_PER_BLOCK,
};
pub use compare::{compare_species, summarize, FailureMatrix, SpeciesRow};
pub use plan::{modes_for, AnalysisOptions, ExperimentPlan};
pub use pqf::{evaluate_pqf, run_pqf, FailingTest, PqfEntry, PqfReport};
