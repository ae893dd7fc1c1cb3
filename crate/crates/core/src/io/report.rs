use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::{CampaignResult, FailureMatrix, PqfReport};
use crate::error::{Error, Result};

pub const REPORT_SCHEMA: &str = "pqf-report/1";

/// Where a report came from. The timestamp is left empty unless supplied so
/// that repeated runs give identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub software: String,
    pub version: String,
    pub seeds: Vec<u64>,
    pub timestamp: Option<String>,
}

impl Provenance {
    pub fn new(seeds: Vec<u64>) -> Self {
        Self {
            software: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seeds,
            timestamp: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "result", rename_all = "snake_case")]
pub enum ReportBody {
    Campaign(CampaignResult),
    Pqf(PqfReport),
    Compare(FailureMatrix),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub provenance: Provenance,
    #[serde(flatten)]
    pub body: ReportBody,
}

impl Report {
    pub fn new(body: ReportBody) -> Self {
        let seeds = match &body {
            ReportBody::Campaign(c) => vec![c.plan.seed],
            ReportBody::Pqf(_) => Vec::new(),
            ReportBody::Compare(f) => f.rows.first().map(|r| r.campaign.plan.seed).into_iter().collect(),
        };
        Self {
            schema: REPORT_SCHEMA.into(),
            provenance: Provenance::new(seeds),
            body,
        }
    }

    pub fn campaign(result: CampaignResult) -> Self {
        Self::new(ReportBody::Campaign(result))
    }

    /// A quality-factor report; `seeds` are those of the underlying campaigns.
    pub fn pqf(report: PqfReport, seeds: Vec<u64>) -> Self {
        let mut r = Self::new(ReportBody::Pqf(report));
        r.provenance.seeds = seeds;
        r
    }

    pub fn compare(matrix: FailureMatrix) -> Self {
        Self::new(ReportBody::Compare(matrix))
    }
}

/// Pretty JSON with keys sorted at every level.
pub fn to_canonical_json(report: &Report) -> Result<String> {
    let value = serde_json::to_value(report)?;
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

pub fn export_results(report: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, to_canonical_json(report)?).map_err(|e| Error::io(path, e))
}

pub fn import_report(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let report: Report = serde_json::from_str(&text)?;
    if report.schema != REPORT_SCHEMA {
        return Err(Error::Unsupported(format!("report schema {:?}", report.schema)));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::evaluate_pqf;
    use crate::engine::{run_campaign, ExperimentPlan};
    use crate::samplers::Source;

    fn small() -> CampaignResult {
        run_campaign(&ExperimentPlan::new(3, 200, 2, 11, Source::ideal())).unwrap()
    }

    #[test]
    fn campaign_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let report = Report::campaign(small());
        export_results(&report, &path).unwrap();
        assert_eq!(import_report(&path).unwrap(), report);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, to_canonical_json(&report).unwrap());
    }

    #[test]
    fn sentinel_is_null_with_reason() {
        let mut c = small();
        c.verdicts[0].passed = false;
        let report = Report::pqf(evaluate_pqf(&[c]).unwrap(), vec![11]);
        let value: serde_json::Value = serde_json::from_str(&to_canonical_json(&report).unwrap()).unwrap();
        assert!(value["result"]["pqf"].is_null());
        assert!(value["result"]["reason"].as_str().unwrap().contains("no campaign"));
        assert_eq!(value["kind"], "pqf");
    }

    #[test]
    fn unwritable_path_fails() {
        let report = Report::campaign(small());
        let e = export_results(&report, Path::new("/nonexistent-dir/r.json")).unwrap_err();
        assert!(matches!(e, Error::Io { .. }));
    }
}
