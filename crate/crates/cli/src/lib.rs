//! The `pqf` command line.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use pqf::engine::{
    analyze, compare_species, run_campaign_with, simulate_records, tally_records, CampaignResult, ExperimentPlan,
    RunOptions,
};
use pqf::error::{Error, Result};
use pqf::io::{
    export_results, ingest_clicks, render_clicks, to_canonical_json, unitary_hash, write_clicks, write_unitary,
    ClickHeader, Report, UnitaryFile,
};
use pqf::linalg::FockPattern;
use pqf::routing::{plan_routing, routing_unitary};
use pqf::samplers::{AlphaChoice, NoiseParams, Source, Species};
use pqf::stats::{chebyshev_sample_size, lemma_series_gap, Thresholds};

/// Exit status for usage and data errors.
pub const EXIT_ERROR: i32 = 2;
/// Exit status for failing verdicts under `--strict`.
pub const EXIT_FAIL: i32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "pqf",
    version,
    about = "Noisy boson-sampling simulator and certification tests"
)]
struct Cli {
    /// Log progress to standard error.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a campaign and write its click records.
    Simulate(SimulateArgs),
    /// Run the five tests on a click file.
    Test(TestArgs),
    /// Run campaigns over several n and report the quality factor.
    Pqf(PqfArgs),
    /// Tabulate particle models against the tests.
    Compare(CompareArgs),
    /// Plan the swap gadgets that move a pattern onto the first modes.
    Route(RouteArgs),
    /// Runs per unitary needed for a target error.
    PlanSamples(PlanSamplesArgs),
    /// Gap between the exact and truncated distinguishability series.
    Lemma(LemmaArgs),
}

#[derive(Args, Debug, Clone)]
struct ThresholdArgs {
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    eps1: f64,
    #[arg(long, default_value_t = 0.5)]
    eps2: f64,
    #[arg(long, default_value_t = 0.5)]
    eps3: f64,
    /// Constant of the loss bound.
    #[arg(long, default_value_t = 1.0)]
    c_loss: f64,
    /// Constants of the t_d1..t_d4 bounds, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 4, default_values_t = [1.0, 1.0, 1.0, 1.0])]
    c: Vec<f64>,
}

impl ThresholdArgs {
    fn thresholds(&self) -> Thresholds {
        Thresholds {
            gamma: self.gamma,
            eps1: self.eps1,
            eps2: self.eps2,
            eps3: self.eps3,
            c_loss: self.c_loss,
            c1: self.c[0],
            c2: self.c[1],
            c3: self.c[2],
            c4: self.c[3],
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SourceArgs {
    /// Per-photon loss probability.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Pairwise overlap of the photons' internal states.
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    /// Favoured-block weight of the adversarial sampler: `leading`, `exact` or a number.
    #[arg(long, default_value = "leading")]
    alpha: String,
    /// Mode count; defaults to ceil(n^(2 + gamma)).
    #[arg(long)]
    modes: Option<usize>,
    /// Bunching block size; defaults to m - n + 1.
    #[arg(long)]
    block: Option<usize>,
    /// Runs per unitary.
    #[arg(long)]
    kprime: u64,
    /// Number of Haar unitaries.
    #[arg(long)]
    kdoubleprime: usize,
    #[arg(long)]
    seed: u64,
    /// Minimum mean records per unitary for a sector to be decided.
    #[arg(long)]
    min_records: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

fn parse_alpha(s: &str) -> Result<AlphaChoice> {
    match s {
        "leading" => Ok(AlphaChoice::LeadingOrder),
        "exact" => Ok(AlphaChoice::HaarExact),
        v => v
            .parse::<f64>()
            .map(|value| AlphaChoice::Fixed { value })
            .map_err(|_| Error::InvalidInput(format!("alpha {v:?} is not leading, exact or a number"))),
    }
}

impl SourceArgs {
    fn plan(&self, n: usize, species: Species, th: Thresholds) -> Result<ExperimentPlan> {
        let mut source = Source::new(species, NoiseParams::new(self.lambda, self.x)?);
        source.alpha = parse_alpha(&self.alpha)?;
        let mut plan = ExperimentPlan::new(n, self.kprime, self.kdoubleprime, self.seed, source);
        plan.modes = self.modes;
        plan.block = self.block;
        plan.thresholds = th;
        if let Some(r) = self.min_records {
            plan.analysis.min_records = r;
        }
        plan.validate()?;
        Ok(plan)
    }

    fn run_options(&self) -> RunOptions {
        RunOptions { workers: self.workers }
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, default_value = "ideal")]
    species: Species,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Click file to write; unitaries go to `unitaries/` beside it. Standard
    /// output with inline unitaries when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TestArgs {
    /// Click file.
    clicks: PathBuf,
    /// Seed for the bootstrap; required unless the file carries its plan.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the thresholds stored in the file.
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long)]
    block: Option<usize>,
    #[arg(long)]
    min_records: Option<u64>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Exit with status 1 when a test fails.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct PqfArgs {
    /// JSON list of campaign plans.
    #[arg(long, conflicts_with = "n")]
    plans: Option<PathBuf>,
    /// Photon numbers to scan, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, default_value = "ideal")]
    species: Species,
    #[command(flatten)]
    source: Option<SourceArgs>,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Exit with status 1 when no n passes.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    n: usize,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "ideal,distinguishable,meanfield,uniform,dad"
    )]
    species: Vec<Species>,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    x: f64,
    #[arg(long, default_value = "leading")]
    alpha: String,
    #[arg(long, default_value_t = 20_000)]
    kprime: u64,
    #[arg(long, default_value_t = 40)]
    kdoubleprime: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RouteArgs {
    /// Occupation pattern as a bitstring (`00111`) or comma list (`0,0,1,1,1`).
    #[arg(long)]
    pattern: String,
    /// Also write the routing unitary in the unitary file format.
    #[arg(long)]
    unitary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlanSamplesArgs {
    /// Target absolute error.
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0.99)]
    confidence: f64,
    /// Variance bound of one run's statistic.
    #[arg(long, default_value_t = 0.25)]
    sigma2: f64,
}

#[derive(Args, Debug)]
struct LemmaArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    x: f64,
}

/// Run the command line and return the process exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_ERROR
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Simulate(a) => simulate(a, out),
        Command::Test(a) => test(a, out),
        Command::Pqf(a) => pqf_scan(a, out),
        Command::Compare(a) => compare(a, out),
        Command::Route(a) => route(a, out),
        Command::PlanSamples(a) => {
            let k = chebyshev_sample_size(a.eps, a.confidence, a.sigma2)?;
            writeln!(out, "{k}").map_err(io_err)?;
            Ok(0)
        }
        Command::Lemma(a) => {
            let g = lemma_series_gap(a.x, a.n)?;
            let value = serde_json::json!({
                "n": a.n,
                "x": a.x,
                "exact": g.exact,
                "approx": g.approx,
                "kappa": g.kappa,
                "scale": g.scale,
                "ratio": g.ratio(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&value)?).map_err(io_err)?;
            Ok(0)
        }
    }
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let plan = a.source.plan(a.n, a.species, a.thresholds.thresholds())?;
    let data = simulate_records(&plan, &a.source.run_options())?;
    let mut header = ClickHeader::new(plan.m(), plan.n);
    header.device = serde_json::json!({ "simulated": plan.source.species.name() });
    header.plan = Some(plan);
    let batches: Vec<_> = data
        .unitaries
        .iter()
        .zip(&data.records)
        .map(|(u, r)| (u, r.as_slice()))
        .collect();
    match &a.out {
        Some(path) => write_clicks(path, &header, &batches)?,
        None => {
            for u in &data.unitaries {
                header.inline.insert(unitary_hash(u), UnitaryFile::from_unitary(u));
            }
            render_clicks(&mut std::io::BufWriter::new(out), &header, &batches)?;
        }
    }
    Ok(0)
}

/// Build the analysis plan for ingested data.
fn ingest_plan(a: &TestArgs, header: &ClickHeader, batches: usize) -> Result<ExperimentPlan> {
    let mut plan = match (&header.plan, a.seed) {
        (Some(p), None) => p.clone(),
        (Some(p), Some(seed)) => ExperimentPlan { seed, ..p.clone() },
        (None, Some(seed)) => {
            let mut p = ExperimentPlan::new(header.n, 1, batches, seed, Source::ideal());
            p.modes = Some(header.m);
            p
        }
        (None, None) => return Err(Error::InvalidInput("file has no plan; pass --seed".into())),
    };
    plan.unitaries = batches;
    if plan.m() != header.m {
        plan.modes = Some(header.m);
    }
    if let Some(path) = &a.thresholds {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
        plan.thresholds = serde_json::from_str(&text)?;
    }
    if a.block.is_some() {
        plan.block = a.block;
    }
    if let Some(r) = a.min_records {
        plan.analysis.min_records = r;
    }
    Ok(plan)
}

fn test(a: TestArgs, out: &mut dyn Write) -> Result<i32> {
    let data = ingest_clicks(&a.clicks)?;
    let plan = ingest_plan(&a, &data.header, data.batches.len())?;
    let tallies = tally_records(data.groups(), plan.n, plan.m(), plan.block())?;
    let result = analyze(&plan, &tallies)?;
    print_campaign(&result, out)?;
    let passed = result.passed();
    if let Some(path) = &a.report {
        export_results(&Report::campaign(result), path)?;
    }
    Ok(if a.strict && !passed { EXIT_FAIL } else { 0 })
}

fn print_campaign(r: &CampaignResult, out: &mut dyn Write) -> Result<()> {
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(io_err);
    w(
        out,
        format!(
            "n = {}, m = {}, K = {}, lambda_hat = {:.5}, window = [{}, {}]",
            r.plan.n, r.m, r.block, r.lambda_hat, r.loss_window.lo, r.loss_window.hi
        ),
    )?;
    w(
        out,
        format!(
            "{:<7}{:>7}{:>12}{:>12}{:>11}{:>11}{:>11}  outcome",
            "test", "sector", "measured", "reference", "deviation", "bound", "std_err"
        ),
    )?;
    let num = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.5}"));
    for v in &r.verdicts {
        let sector = v.sector.map_or("all".to_string(), |l| l.to_string());
        let mut line = format!(
            "{:<7}{:>7}{:>12}{:>12}{:>11}{:>11.5}{:>11}  {}",
            v.test.name(),
            sector,
            num(v.measured),
            num(v.reference),
            num(v.deviation),
            v.bound,
            num(v.std_error),
            v.outcome()
        );
        if let Some(note) = &v.note {
            line.push_str(&format!(" ({note})"));
        }
        w(out, line)?;
    }
    w(out, format!("overall: {}", if r.passed() { "pass" } else { "fail" }))
}

fn pqf_scan(a: PqfArgs, out: &mut dyn Write) -> Result<i32> {
    let (plans, opts) = match (&a.plans, &a.source) {
        (Some(path), source) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            let plans: Vec<ExperimentPlan> = serde_json::from_str(&text)?;
            let opts = source.as_ref().map(SourceArgs::run_options).unwrap_or_default();
            (plans, opts)
        }
        (None, Some(source)) if !a.n.is_empty() => {
            let th = a.thresholds.thresholds();
            let plans =
                a.n.iter()
                    .map(|&n| source.plan(n, a.species, th))
                    .collect::<Result<Vec<_>>>()?;
            (plans, source.run_options())
        }
        _ => {
            return Err(Error::InvalidInput(
                "give --plans, or --n with --kprime, --kdoubleprime and --seed".into(),
            ))
        }
    };
    let results = plans
        .iter()
        .map(|p| run_campaign_with(p, &opts))
        .collect::<Result<Vec<_>>>()?;
    let report = pqf::engine::evaluate_pqf(&results)?;
    for e in &report.entries {
        writeln!(
            out,
            "n = {:>3}  m = {:>5}  {}",
            e.n,
            e.m,
            if e.passed { "pass" } else { "fail" }
        )
        .map_err(io_err)?;
        for f in &e.failures {
            let sector = f.sector.map_or("all".into(), |l| l.to_string());
            writeln!(out, "    {} sector {} {}", f.test, sector, f.outcome).map_err(io_err)?;
        }
    }
    match report.pqf {
        Some(v) => writeln!(out, "PQF = {v}").map_err(io_err)?,
        None => writeln!(out, "PQF = none").map_err(io_err)?,
    }
    if let Some(reason) = &report.reason {
        writeln!(out, "note: {reason}").map_err(io_err)?;
    }
    let code = if a.strict && report.pqf.is_none() { EXIT_FAIL } else { 0 };
    if let Some(path) = &a.report {
        let seeds = plans.iter().map(|p| p.seed).collect();
        export_results(&Report::pqf(report, seeds), path)?;
    }
    Ok(code)
}

fn compare(a: CompareArgs, out: &mut dyn Write) -> Result<i32> {
    let mut source = Source::new(Species::Ideal, NoiseParams::new(a.lambda, a.x)?);
    source.alpha = parse_alpha(&a.alpha)?;
    let mut plan = ExperimentPlan::new(a.n, a.kprime, a.kdoubleprime, a.seed, source);
    plan.thresholds = a.thresholds.thresholds();
    let matrix = compare_species(&plan, &a.species, &RunOptions { workers: a.workers })?;
    write!(out, "{}", matrix.render()).map_err(io_err)?;
    if let Some(path) = &a.report {
        export_results(&Report::compare(matrix), path)?;
    }
    Ok(0)
}

fn parse_pattern(s: &str) -> Result<FockPattern> {
    let occ: Vec<u16> = if s.contains(',') {
        s.split(',')
            .map(|v| v.trim().parse::<u16>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("pattern {s:?}: {e}")))?
    } else {
        s.chars()
            .map(|c| c.to_digit(10).map(|d| d as u16))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvalidInput(format!("pattern {s:?} is not a digit string")))?
    };
    if occ.is_empty() {
        return Err(Error::InvalidInput("empty pattern".into()));
    }
    Ok(FockPattern::new(occ))
}

fn route(a: RouteArgs, out: &mut dyn Write) -> Result<i32> {
    let pattern = parse_pattern(&a.pattern)?;
    let plan = plan_routing(&pattern)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&plan.gadgets)?).map_err(io_err)?;
    if let Some(path) = &a.unitary {
        write_unitary(&routing_unitary(&plan)?, path)?;
    }
    Ok(0)
}

/// Canonical JSON of a campaign report, as written by `test --report`.
pub fn campaign_report_json(result: CampaignResult) -> Result<String> {
    to_canonical_json(&Report::campaign(result))
}
