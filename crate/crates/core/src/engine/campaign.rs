use log::{debug, info};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::ExperimentPlan;
use crate::error::{Error, Result};
use crate::linalg::{haar_random_unitary_with, Unitary};
use crate::rng::{self, Purpose};
use crate::samplers::{ClickRecord, Sampler};
use crate::stats::bootstrap::{bootstrap_std_error, mean_of};
use crate::stats::{
    estimate_bunching, estimate_loss_from_histograms, loss_window, test_bunching, LossWindow, PooledMoments,
    SectorCounts, SectorReference, TestId, TestVerdict, SPLITS,
};

/// Records generated from one RNG stream. Fixed so that results do not
/// depend on how blocks are spread over threads.
pub const RECORDS_PER_BLOCK: u64 = 2048;

const _: () = assert!(RECORDS_PER_BLOCK.is_multiple_of(SPLITS as u64));

/// Execution settings that must not affect results.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; the global rayon pool when unset.
    pub workers: Option<usize>,
}

impl RunOptions {
    pub fn with_workers(workers: usize) -> Self {
        Self { workers: Some(workers) }
    }

    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.workers {
            None => Ok(f()),
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map(|pool| pool.install(f))
                .map_err(|e| Error::InvalidInput(format!("cannot start {w} workers: {e}"))),
        }
    }
}

/// Sufficient statistics for one unitary, one entry per loss sector `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitaryTally {
    /// Records seen so far, in every sector.
    pub records: u64,
    pub sectors: Vec<SectorCounts>,
}

impl UnitaryTally {
    pub fn new(n: usize, m: usize, block: usize) -> Self {
        Self {
            records: 0,
            sectors: vec![SectorCounts::new(m, block); n + 1],
        }
    }

    pub fn add(&mut self, record: &ClickRecord) -> Result<()> {
        let sector = self
            .sectors
            .get_mut(record.lost)
            .ok_or_else(|| Error::InvalidInput(format!("record lost {} photons", record.lost)))?;
        if record.pattern.modes() != sector.m {
            return Err(Error::Shape(format!(
                "pattern has {} modes, expected {}",
                record.pattern.modes(),
                sector.m
            )));
        }
        // Subsamples follow the record's position for this unitary, so streamed
        // and block-parallel tallies agree.
        sector.add_to(&record.pattern, (self.records % SPLITS as u64) as usize);
        self.records += 1;
        Ok(())
    }

    pub fn merge(mut self, other: UnitaryTally) -> Self {
        self.records += other.records;
        for (a, b) in self.sectors.iter_mut().zip(&other.sectors) {
            a.merge(b);
        }
        self
    }

    pub fn loss_histogram(&self) -> Vec<u64> {
        self.sectors.iter().map(|s| s.records).collect()
    }
}

/// Generated interferometers and their records.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedData {
    pub unitaries: Vec<Unitary>,
    pub records: Vec<Vec<ClickRecord>>,
}

/// The `index`-th interferometer of a campaign.
pub fn draw_unitary(seed: u64, index: usize, m: usize) -> Result<Unitary> {
    haar_random_unitary_with(m, &mut rng::stream(seed, Purpose::Unitary, index as u64, 0))
}

fn block_count(plan: &ExperimentPlan) -> u64 {
    plan.runs_per_unitary.div_ceil(RECORDS_PER_BLOCK)
}

fn for_each_in_block(
    plan: &ExperimentPlan,
    sampler: &Sampler<'_>,
    u: usize,
    b: u64,
    mut sink: impl FnMut(ClickRecord) -> Result<()>,
) -> Result<()> {
    let mut rng = rng::stream(plan.seed, Purpose::Samples, u as u64, b);
    let start = b * RECORDS_PER_BLOCK;
    let count = RECORDS_PER_BLOCK.min(plan.runs_per_unitary - start);
    for _ in 0..count {
        sink(sampler.sample(&mut rng)?)?;
    }
    Ok(())
}

fn draw_unitaries(plan: &ExperimentPlan) -> Result<Vec<Unitary>> {
    let m = plan.m();
    (0..plan.unitaries)
        .into_par_iter()
        .map(|u| draw_unitary(plan.seed, u, m))
        .collect()
}

/// Generate every record of a simulated campaign.
pub fn simulate_records(plan: &ExperimentPlan, opts: &RunOptions) -> Result<SimulatedData> {
    plan.validate()?;
    opts.install(|| {
        let unitaries = draw_unitaries(plan)?;
        let records = unitaries
            .par_iter()
            .enumerate()
            .map(|(u, unitary)| {
                let sampler = Sampler::new(unitary, u, plan.n, plan.source.clone(), plan.block())?;
                let mut out = Vec::with_capacity(plan.runs_per_unitary as usize);
                for b in 0..block_count(plan) {
                    for_each_in_block(plan, &sampler, u, b, |r| {
                        out.push(r);
                        Ok(())
                    })?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SimulatedData { unitaries, records })
    })?
}

/// Simulate a campaign straight into per-unitary tallies.
pub fn simulate_tallies(plan: &ExperimentPlan, opts: &RunOptions) -> Result<Vec<UnitaryTally>> {
    plan.validate()?;
    let (n, m, block) = (plan.n, plan.m(), plan.block());
    opts.install(|| {
        let unitaries = draw_unitaries(plan)?;
        unitaries
            .par_iter()
            .enumerate()
            .map(|(u, unitary)| {
                let sampler = Sampler::new(unitary, u, n, plan.source.clone(), block)?;
                let tally = (0..block_count(plan))
                    .into_par_iter()
                    .map(|b| {
                        let mut t = UnitaryTally::new(n, m, block);
                        for_each_in_block(plan, &sampler, u, b, |r| t.add(&r))?;
                        Ok::<_, Error>(t)
                    })
                    .try_reduce(|| UnitaryTally::new(n, m, block), |a, b| Ok(a.merge(b)))?;
                debug!("unitary {u}: {} records", plan.runs_per_unitary);
                Ok(tally)
            })
            .collect()
    })?
}

/// Tallies of ingested records, grouped by unitary.
pub fn tally_records<'a>(
    groups: impl IntoIterator<Item = &'a [ClickRecord]>,
    n: usize,
    m: usize,
    block: usize,
) -> Result<Vec<UnitaryTally>> {
    groups
        .into_iter()
        .map(|records| {
            let mut t = UnitaryTally::new(n, m, block);
            for r in records {
                t.add(r)?;
            }
            Ok(t)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorStatus {
    Evaluated,
    OutsideWindow,
    Missing,
    Underpopulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSummary {
    pub sector: usize,
    pub n_eff: usize,
    pub records: u64,
    pub collisions: u64,
    pub status: SectorStatus,
}

/// Every verdict of one campaign plus the quantities they were built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub plan: ExperimentPlan,
    pub m: usize,
    pub block: usize,
    pub lambda_hat: f64,
    pub lambda_std_error: Option<f64>,
    pub loss_window: LossWindow,
    pub sectors: Vec<SectorSummary>,
    pub references: Vec<SectorReference>,
    pub verdicts: Vec<TestVerdict>,
}

impl CampaignResult {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TestVerdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }

    pub fn verdict(&self, test: TestId, sector: Option<usize>) -> Option<&TestVerdict> {
        self.verdicts.iter().find(|v| v.test == test && v.sector == sector)
    }

    /// Sectors in the loss window that could not be evaluated.
    pub fn undecided_sectors(&self) -> Vec<usize> {
        self.sectors
            .iter()
            .filter(|s| matches!(s.status, SectorStatus::Missing | SectorStatus::Underpopulated))
            .map(|s| s.sector)
            .collect()
    }

    /// The verdict used to summarise `test`: the loss verdict, or the decided
    /// verdict of the evaluated sector holding the most records.
    pub fn headline(&self, test: TestId) -> Option<&TestVerdict> {
        if test == TestId::TLoss {
            return self.verdict(test, None);
        }
        self.verdicts
            .iter()
            .filter(|v| v.test == test && v.measured.is_some())
            .max_by(|a, b| {
                let records = |v: &TestVerdict| v.sector.map_or(0, |l| self.sectors[l].records);
                records(a).cmp(&records(b)).then(b.sector.cmp(&a.sector))
            })
    }
}

/// Simulate and analyse a campaign with default execution settings.
pub fn run_campaign(plan: &ExperimentPlan) -> Result<CampaignResult> {
    run_campaign_with(plan, &RunOptions::default())
}

pub fn run_campaign_with(plan: &ExperimentPlan, opts: &RunOptions) -> Result<CampaignResult> {
    info!(
        "campaign n={} m={} species={} K'={} K''={}",
        plan.n,
        plan.m(),
        plan.source.species,
        plan.runs_per_unitary,
        plan.unitaries
    );
    let tallies = simulate_tallies(plan, opts)?;
    analyze(plan, &tallies)
}

fn bootstrap_tag(test: TestId, sector: usize) -> u64 {
    (test as u64) << 32 | sector as u64
}

/// Estimate, compare against references and decide every test.
pub fn analyze(plan: &ExperimentPlan, tallies: &[UnitaryTally]) -> Result<CampaignResult> {
    plan.validate()?;
    let (n, m, block) = (plan.n, plan.m(), plan.block());
    let th = &plan.thresholds;
    let opts = &plan.analysis;
    if let Some(t) = tallies.iter().find(|t| t.sectors.len() != n + 1) {
        return Err(Error::Shape(format!(
            "tally has {} sectors, expected {}",
            t.sectors.len(),
            n + 1
        )));
    }

    let histograms: Vec<Vec<u64>> = tallies.iter().map(UnitaryTally::loss_histogram).collect();
    let loss = estimate_loss_from_histograms(&histograms, n, None)?;
    let lambda_se = bootstrap_std_error(
        &loss.per_unitary,
        opts.bootstrap_resamples,
        plan.seed,
        bootstrap_tag(TestId::TLoss, 0),
        mean_of,
    );
    let window = loss_window(loss.pooled, n, opts.confidence)?;
    let mut verdicts = vec![TestVerdict::loss(loss.pooled, lambda_se, n, th)];

    let per_unitary_goal = opts.min_records as f64;
    let sectors: Vec<SectorSummary> = (0..=n)
        .map(|l| {
            let records: u64 = tallies.iter().map(|t| t.sectors[l].records).sum();
            let collisions = tallies.iter().map(|t| t.sectors[l].collisions).sum();
            let status = if !window.contains(l) {
                SectorStatus::OutsideWindow
            } else if records == 0 {
                SectorStatus::Missing
            } else if (records as f64) / (tallies.len() as f64) < per_unitary_goal {
                SectorStatus::Underpopulated
            } else {
                SectorStatus::Evaluated
            };
            SectorSummary {
                sector: l,
                n_eff: n - l,
                records,
                collisions,
                status,
            }
        })
        .collect();

    let mut references = Vec::new();
    for summary in sectors.iter().filter(|s| window.contains(s.sector) && s.sector < n) {
        let l = summary.sector;
        let reference = opts.references.sector(n, n - l, m, block)?;
        references.push(reference);
        let undecided_note = match summary.status {
            SectorStatus::Missing => Some("no records in sector".to_string()),
            SectorStatus::Underpopulated => Some(format!(
                "{:.1} records per unitary, need {}",
                summary.records as f64 / tallies.len() as f64,
                opts.min_records
            )),
            _ => None,
        };
        let counts: Vec<&SectorCounts> = tallies.iter().map(|t| &t.sectors[l]).collect();

        if let Some(expected) = reference.moments {
            match &undecided_note {
                Some(note) => {
                    for test in TestId::MOMENTS {
                        verdicts.push(TestVerdict::undecided(
                            test,
                            l,
                            Some(expected.get(test)),
                            th.bound(test, n),
                            note.clone(),
                        ));
                    }
                }
                None => verdicts.extend(moment_verdicts(plan, &counts, l, &expected)?),
            }
        }

        match &undecided_note {
            Some(note) => verdicts.push(TestVerdict::undecided(
                TestId::TD4,
                l,
                Some(reference.bunching),
                th.bunching_bound(n),
                note.clone(),
            )),
            None => {
                let (fractions, mean) = estimate_bunching(counts.iter().copied())?;
                let se = bootstrap_std_error(
                    &fractions,
                    opts.bootstrap_resamples,
                    plan.seed,
                    bootstrap_tag(TestId::TD4, l),
                    mean_of,
                );
                verdicts.push(test_bunching(mean, reference.bunching, l, n, se, th));
            }
        }
    }

    let result = CampaignResult {
        plan: plan.clone(),
        m,
        block,
        lambda_hat: loss.pooled,
        lambda_std_error: lambda_se,
        loss_window: window,
        sectors,
        references,
        verdicts,
    };
    info!(
        "campaign n={} species={}: {}",
        n,
        plan.source.species,
        if result.passed() {
            "all tests pass"
        } else {
            "some tests fail"
        }
    );
    Ok(result)
}

fn moment_verdicts(
    plan: &ExperimentPlan,
    counts: &[&SectorCounts],
    l: usize,
    expected: &crate::stats::MomentTriple,
) -> Result<Vec<TestVerdict>> {
    let (n, m) = (plan.n, plan.m());
    let n_eff = n - l;
    let th = &plan.thresholds;
    let raw: Vec<[f64; 3]> = counts
        .iter()
        .filter(|c| c.records >= 2 * SPLITS as u64)
        .map(|c| c.raw_moments(l))
        .collect::<Result<_>>()?;
    if raw.is_empty() {
        return Ok(TestId::MOMENTS
            .into_iter()
            .map(|test| {
                let note = "no unitary has enough records for the moment estimates";
                TestVerdict::undecided(test, l, Some(expected.get(test)), th.bound(test, n), note)
            })
            .collect());
    }
    let pooled = PooledMoments::from_raw(&raw)?;
    let values = [Ok(pooled.nm(n_eff, m)), pooled.cv(), pooled.skewness()];
    let mut out = Vec::with_capacity(3);
    for (k, (test, value)) in TestId::MOMENTS.into_iter().zip(values).enumerate() {
        let bound = th.bound(test, n);
        match value {
            Ok(measured) => {
                let se = bootstrap_std_error(
                    &raw,
                    plan.analysis.bootstrap_resamples,
                    plan.seed,
                    bootstrap_tag(test, l),
                    |sample: &[&[f64; 3]]| {
                        let draw: Vec<[f64; 3]> = sample.iter().map(|&&r| r).collect();
                        let p = PooledMoments::from_raw(&draw).ok()?;
                        match k {
                            0 => Some(p.nm(n_eff, m)),
                            1 => p.cv().ok(),
                            _ => p.skewness().ok(),
                        }
                    },
                );
                out.push(TestVerdict::compare(test, l, measured, expected.get(test), bound, se));
            }
            Err(e) => out.push(TestVerdict::undecided(
                test,
                l,
                Some(expected.get(test)),
                bound,
                e.to_string(),
            )),
        }
    }
    Ok(out)
}
