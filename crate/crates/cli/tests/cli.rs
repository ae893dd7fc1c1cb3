use std::path::Path;

use pqf_cli::{run, EXIT_ERROR, EXIT_FAIL};
use serde_json::Value;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn pqf(args: &[&str]) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("pqf").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SIMULATE: [&str; 13] = [
    "simulate",
    "--species",
    "ideal",
    "--n",
    "3",
    "--gamma",
    "0.5",
    "--kprime",
    "1000",
    "--kdoubleprime",
    "5",
    "--seed",
    "7",
];

#[test]
fn help_and_version_succeed() {
    let out = pqf(&["--help"]);
    assert_eq!(out.code, 0);
    for cmd in ["simulate", "test", "pqf", "compare", "route", "plan-samples", "lemma"] {
        assert!(out.stdout.contains(cmd), "{cmd} missing from help");
    }
    assert_eq!(pqf(&["--version"]).code, 0);
    assert_eq!(pqf(&["route", "--help"]).code, 0);
}

#[test]
fn usage_errors_exit_two() {
    let out = pqf(&["route", "--bogus"]);
    assert_eq!(out.code, EXIT_ERROR);
    assert!(out.stderr.contains("--bogus"));
    assert_eq!(pqf(&[]).code, EXIT_ERROR);
    assert_eq!(pqf(&["plan-samples", "--eps", "-1"]).code, EXIT_ERROR);
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a/run.clicks");
    let b = dir.path().join("b/run.clicks");
    std::fs::create_dir_all(a.parent().unwrap()).unwrap();
    std::fs::create_dir_all(b.parent().unwrap()).unwrap();
    for p in [&a, &b] {
        let mut args = SIMULATE.to_vec();
        args.extend(["--out", path(p)]);
        assert_eq!(pqf(&args).code, 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read_dir(a.parent().unwrap().join("unitaries"))
            .unwrap()
            .count(),
        5
    );

    let streamed = pqf(&SIMULATE);
    assert_eq!(streamed.code, 0);
    let header: Value = serde_json::from_str(streamed.stdout.lines().next().unwrap()).unwrap();
    assert_eq!((header["m"].as_u64(), header["n"].as_u64()), (Some(16), Some(3)));
    assert_eq!(header["inline"].as_object().unwrap().len(), 5);
}

#[test]
fn test_command_reads_simulated_file() {
    let dir = tempfile::tempdir().unwrap();
    let clicks = dir.path().join("run.clicks");
    let report = dir.path().join("report.json");
    let mut args = SIMULATE.to_vec();
    args.extend(["--out", path(&clicks)]);
    assert_eq!(pqf(&args).code, 0);

    let out = pqf(&["test", path(&clicks), "--min-records", "100", "--report", path(&report)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("t_d4") && out.stdout.contains("overall:"));
    let value: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(value["kind"], "campaign");
    assert_eq!(value["provenance"]["seeds"][0], 7);
}

#[test]
fn strict_test_of_failing_data_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let clicks = dir.path().join("uniform.clicks");
    let out = pqf(&[
        "simulate",
        "--species",
        "uniform",
        "--n",
        "3",
        "--kprime",
        "2000",
        "--kdoubleprime",
        "5",
        "--seed",
        "3",
        "--out",
        path(&clicks),
    ]);
    assert_eq!(out.code, 0);
    let out = pqf(&["test", path(&clicks), "--strict"]);
    assert_eq!(out.code, EXIT_FAIL);
    assert!(out.stdout.contains("overall: fail"));
    assert_eq!(pqf(&["test", path(&clicks)]).code, 0);
}

#[test]
fn missing_or_corrupt_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pqf(&["test", path(&dir.path().join("absent.clicks"))]).code, EXIT_ERROR);
    let bad = dir.path().join("bad.clicks");
    std::fs::write(
        &bad,
        "{\"format\":\"pqf-clicks\",\"version\":1,\"m\":4,\"n\":2}\n@unitary abc\n0101\n",
    )
    .unwrap();
    let out = pqf(&["test", path(&bad), "--seed", "1"]);
    assert_eq!(out.code, EXIT_ERROR);
    assert!(!out.stderr.is_empty());
}

#[test]
fn route_prints_gadgets() {
    let out = pqf(&["route", "--pattern", "00111"]);
    assert_eq!(out.code, 0);
    let gadgets: Value = serde_json::from_str(&out.stdout).unwrap();
    let modes: Vec<u64> = gadgets
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["i"].as_u64().unwrap())
        .collect();
    assert_eq!(modes, [2, 1, 3, 2, 4, 3]);
    let same = pqf(&["route", "--pattern", "0,0,1,1,1"]);
    assert_eq!(same.stdout, out.stdout);
    assert_eq!(pqf(&["route", "--pattern", "0,2,1"]).code, EXIT_ERROR);

    let dir = tempfile::tempdir().unwrap();
    let u = dir.path().join("route.json");
    assert_eq!(pqf(&["route", "--pattern", "01", "--unitary", path(&u)]).code, 0);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&u).unwrap()).unwrap();
    assert_eq!(file["re"], serde_json::json!([[0.0, 1.0], [1.0, 0.0]]));
}

#[test]
fn plan_samples_and_lemma() {
    let out = pqf(&["plan-samples", "--eps", "0.01"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("250000"), "{}", out.stdout);

    let out = pqf(&["lemma", "--n", "100", "--x", "0.99999"]);
    assert_eq!(out.code, 0);
    let gap: Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(gap["kappa"].as_f64().unwrap().abs() <= gap["scale"].as_f64().unwrap());
}

#[test]
fn compare_prints_matrix_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("compare.json");
    let out = pqf(&[
        "compare",
        "--n",
        "3",
        "--species",
        "ideal,dad",
        "--kprime",
        "5000",
        "--kdoubleprime",
        "10",
        "--report",
        path(&report),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let dad = out.stdout.lines().find(|l| l.starts_with("dad")).unwrap();
    assert!(dad.contains("fail"));
    let value: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(value["kind"], "compare");
    assert_eq!(value["result"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn pqf_scan_reports_value() {
    let out = pqf(&[
        "pqf",
        "--n",
        "3",
        "--kprime",
        "10000",
        "--kdoubleprime",
        "20",
        "--seed",
        "1",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("PQF = 3"), "{}", out.stdout);
    let out = pqf(&[
        "pqf",
        "--n",
        "3",
        "--species",
        "uniform",
        "--kprime",
        "2000",
        "--kdoubleprime",
        "5",
        "--seed",
        "1",
        "--strict",
    ]);
    assert_eq!(out.code, EXIT_FAIL);
    assert!(out.stdout.contains("PQF = none"));
}
