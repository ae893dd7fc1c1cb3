use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictness parameters of the five tests.
///
/// Bounds are `c_loss n^-eps1` for the loss test, `c_k n^-(1 + eps2)` for the
/// three correlator moments and `c4 n^-(gamma + eps3)` for the bunching test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub gamma: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    pub c_loss: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            eps1: 0.5,
            eps2: 0.5,
            eps3: 0.5,
            c_loss: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma", self.gamma),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
            ("eps3", self.eps3),
            ("c_loss", self.c_loss),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("c4", self.c4),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("threshold {name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    pub fn loss_bound(&self, n: usize) -> f64 {
        self.c_loss * (n as f64).powf(-self.eps1)
    }

    /// Bound for `t_d1`, `t_d2` or `t_d3`.
    pub fn moment_bound(&self, test: TestId, n: usize) -> f64 {
        let c = match test {
            TestId::TD1 => self.c1,
            TestId::TD2 => self.c2,
            TestId::TD3 => self.c3,
            _ => panic!("{test} is not a moment test"),
        };
        c * (n as f64).powf(-(1.0 + self.eps2))
    }

    pub fn bunching_bound(&self, n: usize) -> f64 {
        self.c4 * (n as f64).powf(-(self.gamma + self.eps3))
    }

    pub fn bound(&self, test: TestId, n: usize) -> f64 {
        match test {
            TestId::TLoss => self.loss_bound(n),
            TestId::TD4 => self.bunching_bound(n),
            moment => self.moment_bound(moment, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TestId {
    #[serde(rename = "t_loss")]
    TLoss,
    #[serde(rename = "t_d1")]
    TD1,
    #[serde(rename = "t_d2")]
    TD2,
    #[serde(rename = "t_d3")]
    TD3,
    #[serde(rename = "t_d4")]
    TD4,
}

impl TestId {
    pub const ALL: [TestId; 5] = [TestId::TLoss, TestId::TD1, TestId::TD2, TestId::TD3, TestId::TD4];
    pub const MOMENTS: [TestId; 3] = [TestId::TD1, TestId::TD2, TestId::TD3];

    pub fn name(&self) -> &'static str {
        match self {
            TestId::TLoss => "t_loss",
            TestId::TD1 => "t_d1",
            TestId::TD2 => "t_d2",
            TestId::TD3 => "t_d3",
            TestId::TD4 => "t_d4",
        }
    }
}

impl std::fmt::Display for TestId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Three-way reading of a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Inconclusive,
    Fail,
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Inconclusive => "inconclusive",
            Outcome::Fail => "fail",
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one test in one loss sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub test: TestId,
    /// Loss sector; `None` for the loss test, which pools all sectors.
    pub sector: Option<usize>,
    pub measured: Option<f64>,
    pub reference: Option<f64>,
    /// `|measured - reference|`, or `measured` for the loss test.
    pub deviation: Option<f64>,
    pub bound: f64,
    pub std_error: Option<f64>,
    pub passed: bool,
    /// The bound lies within two standard errors of the deviation, or the
    /// sector had too little data to decide.
    pub inconclusive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TestVerdict {
    /// Loss test: passes when `lambda_hat <= bound`.
    pub fn loss(lambda_hat: f64, std_error: Option<f64>, n: usize, th: &Thresholds) -> Self {
        Self::decide(TestId::TLoss, None, lambda_hat, None, th.loss_bound(n), std_error)
    }

    /// Two-sided comparison against a reference value.
    pub fn compare(
        test: TestId,
        sector: usize,
        measured: f64,
        reference: f64,
        bound: f64,
        std_error: Option<f64>,
    ) -> Self {
        Self::decide(test, Some(sector), measured, Some(reference), bound, std_error)
    }

    pub fn outcome(&self) -> Outcome {
        if self.inconclusive {
            Outcome::Inconclusive
        } else if self.passed {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    /// Verdict for a sector that could not be evaluated.
    pub fn undecided(
        test: TestId,
        sector: usize,
        reference: Option<f64>,
        bound: f64,
        reason: impl Into<String>,
    ) -> Self {
        Self {
            test,
            sector: Some(sector),
            measured: None,
            reference,
            deviation: None,
            bound,
            std_error: None,
            passed: false,
            inconclusive: true,
            note: Some(reason.into()),
        }
    }

    fn decide(
        test: TestId,
        sector: Option<usize>,
        measured: f64,
        reference: Option<f64>,
        bound: f64,
        std_error: Option<f64>,
    ) -> Self {
        let deviation = match reference {
            Some(r) => (measured - r).abs(),
            None => measured,
        };
        let passed = deviation <= bound;
        let inconclusive = std_error.is_some_and(|se| (deviation - bound).abs() <= 2.0 * se);
        Self {
            test,
            sector,
            measured: Some(measured),
            reference,
            deviation: Some(deviation),
            bound,
            std_error,
            passed,
            inconclusive,
            note: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loss_verdicts() {
        let th = Thresholds::default();
        assert!(TestVerdict::loss(0.0, None, 100, &th).passed);
        assert!(!TestVerdict::loss(1.0, None, 2, &th).passed);
        let v = TestVerdict::loss(0.1, None, 5, &th);
        assert!((v.bound - 0.447_213_595_499_958).abs() < 1e-12);
        assert!(v.passed);
    }

    #[test]
    fn exact_match_passes() {
        let th = Thresholds::default();
        for test in TestId::MOMENTS {
            let v = TestVerdict::compare(test, 0, -1.0, -1.0, th.bound(test, 4), Some(0.01));
            assert!(v.passed && !v.inconclusive);
        }
    }

    #[test]
    fn inconclusive_band() {
        let v = TestVerdict::compare(TestId::TD4, 0, 0.30, 0.0, 0.25, Some(0.03));
        assert!(!v.passed && v.inconclusive);
        assert_eq!(v.outcome(), Outcome::Inconclusive);
        let v = TestVerdict::compare(TestId::TD4, 0, 0.40, 0.0, 0.25, Some(0.03));
        assert!(!v.passed && !v.inconclusive);
        assert_eq!(v.outcome(), Outcome::Fail);
    }

    #[test]
    fn validation_rejects_nonpositive() {
        let th = Thresholds {
            eps2: 0.0,
            ..Thresholds::default()
        };
        assert!(th.validate().is_err());
        assert!(Thresholds::default().validate().is_ok());
    }

    #[test]
    fn test_ids_serialise_by_name() {
        for t in TestId::ALL {
            assert_eq!(serde_json::to_string(&t).unwrap(), format!("\"{}\"", t.name()));
        }
    }
}
