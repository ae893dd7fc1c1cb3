use pqf::engine::{
    analyze, compare_species, run_campaign, run_campaign_with, run_pqf, simulate_records, tally_records,
    ExperimentPlan, RunOptions, SectorStatus,
};
use pqf::io::{export_results, import_report, ingest_clicks, to_canonical_json, write_clicks, ClickHeader, Report};
use pqf::samplers::{NoiseParams, Source, Species};
use pqf::stats::{Outcome, TestId};

fn plan(species: Species, n: usize, kprime: u64, kdoubleprime: usize, seed: u64) -> ExperimentPlan {
    ExperimentPlan::new(n, kprime, kdoubleprime, seed, Source::new(species, NoiseParams::IDEAL))
}

#[test]
fn ideal_campaign_passes() {
    let r = run_campaign(&plan(Species::Ideal, 3, 10_000, 20, 1)).unwrap();
    assert_eq!(r.m, 16);
    for test in [TestId::TLoss, TestId::TD1, TestId::TD2, TestId::TD4] {
        assert!(r.headline(test).unwrap().passed, "{test}");
    }
    assert!(
        r.verdicts.iter().all(|v| v.outcome() != Outcome::Fail),
        "{:?}",
        r.verdicts
    );
}

#[test]
fn distinguishable_campaign_fails() {
    let r = run_campaign(&plan(Species::Distinguishable, 3, 10_000, 20, 1)).unwrap();
    assert!(!r.passed());
    assert_eq!(r.headline(TestId::TD2).unwrap().outcome(), Outcome::Fail);
    assert!(r.headline(TestId::TLoss).unwrap().passed);
}

#[test]
fn adversarial_campaign_passes_bunching_and_fails_mean() {
    let r = run_campaign(&plan(Species::Dad, 3, 10_000, 20, 1)).unwrap();
    assert!(r.headline(TestId::TD4).unwrap().passed);
    assert_eq!(r.headline(TestId::TD1).unwrap().outcome(), Outcome::Fail);
}

#[test]
fn failure_matrix_at_four_photons() {
    let species = [
        Species::Ideal,
        Species::Distinguishable,
        Species::MeanField,
        Species::Dad,
    ];
    let matrix = compare_species(
        &plan(Species::Ideal, 4, 20_000, 40, 7),
        &species,
        &RunOptions::default(),
    )
    .unwrap();
    assert_eq!((matrix.n, matrix.m), (4, 32));
    let ideal = matrix.row(Species::Ideal).unwrap();
    assert!(ideal.campaign.passed());
    assert!(ideal.cells.values().all(|&o| o != Outcome::Fail));
    assert_eq!(
        matrix.row(Species::Distinguishable).unwrap().cell(TestId::TD2),
        Outcome::Fail
    );
    let sb = matrix.row(Species::MeanField).unwrap();
    assert_eq!(sb.cell(TestId::TD1), Outcome::Pass);
    assert_eq!(sb.cell(TestId::TD2), Outcome::Fail);
    let dad = matrix.row(Species::Dad).unwrap();
    assert_eq!(dad.cell(TestId::TD1), Outcome::Fail);
    assert_eq!(dad.cell(TestId::TD4), Outcome::Pass);
    let table = matrix.render();
    assert!(table.lines().count() == 5 && table.contains("meanfield"));
}

#[test]
fn quality_factor_of_real_campaigns() {
    let opts = RunOptions::default();
    let report = run_pqf(&[plan(Species::Ideal, 3, 10_000, 20, 1)], &opts).unwrap();
    assert_eq!(report.pqf, Some(3));
    let report = run_pqf(&[plan(Species::Distinguishable, 3, 10_000, 20, 1)], &opts).unwrap();
    assert_eq!(report.pqf, None);
    assert!(report.reason.is_some());
    assert!(report.failures().any(|f| f.test == TestId::TD2));
}

#[test]
fn click_file_round_trip_matches_in_memory_run() {
    let source = Source::new(Species::Ideal, NoiseParams::new(0.2, 0.95).unwrap());
    let mut p = ExperimentPlan::new(3, 5_000, 4, 21, source);
    p.analysis.min_records = 100;
    let direct = run_campaign(&p).unwrap();

    let data = simulate_records(&p, &RunOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.clicks");
    let mut header = ClickHeader::new(p.m(), p.n);
    header.plan = Some(p.clone());
    let batches: Vec<_> = data
        .unitaries
        .iter()
        .zip(&data.records)
        .map(|(u, r)| (u, r.as_slice()))
        .collect();
    write_clicks(&path, &header, &batches).unwrap();

    let ingested = ingest_clicks(&path).unwrap();
    assert_eq!(ingested.record_count(), 20_000);
    assert_eq!(ingested.header.plan.as_ref(), Some(&p));
    let tallies = tally_records(ingested.groups(), p.n, p.m(), p.block()).unwrap();
    let replayed = analyze(&p, &tallies).unwrap();
    assert_eq!(replayed, direct);

    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    export_results(&Report::campaign(direct), &a).unwrap();
    export_results(&Report::campaign(replayed), &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let back = import_report(&a).unwrap();
    assert_eq!(to_canonical_json(&back).unwrap(), std::fs::read_to_string(&a).unwrap());
}

#[test]
fn missing_sector_is_reported_undecided() {
    let source = Source::new(Species::Ideal, NoiseParams::new(0.3, 1.0).unwrap());
    let mut p = ExperimentPlan::new(3, 4_000, 4, 22, source);
    p.analysis.min_records = 100;
    let data = simulate_records(&p, &RunOptions::default()).unwrap();
    let kept: Vec<Vec<_>> = data
        .records
        .iter()
        .map(|g| g.iter().filter(|r| r.lost != 1).cloned().collect())
        .collect();
    let tallies = tally_records(kept.iter().map(Vec::as_slice), p.n, p.m(), p.block()).unwrap();
    let r = analyze(&p, &tallies).unwrap();
    assert!(r.loss_window.contains(1));
    assert_eq!(r.sectors[1].status, SectorStatus::Missing);
    assert!(r.undecided_sectors().contains(&1));
    let undecided: Vec<_> = r.verdicts.iter().filter(|v| v.sector == Some(1)).collect();
    assert!(!undecided.is_empty());
    assert!(undecided
        .iter()
        .all(|v| v.inconclusive && !v.passed && v.note.is_some()));
    assert!(!r.passed());
}

#[test]
fn worker_count_does_not_change_results() {
    let source = Source::new(Species::MeanField, NoiseParams::new(0.1, 0.9).unwrap());
    let p = ExperimentPlan::new(3, 5_000, 5, 23, source);
    let one = run_campaign_with(&p, &RunOptions::with_workers(1)).unwrap();
    let three = run_campaign_with(&p, &RunOptions::with_workers(3)).unwrap();
    assert_eq!(
        to_canonical_json(&Report::campaign(one)).unwrap(),
        to_canonical_json(&Report::campaign(three)).unwrap()
    );
}
