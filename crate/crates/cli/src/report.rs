//! Machine-readable reports. Output is a pure function of the inputs unless
//! timings are requested.

use serde::Serialize;

use ckg_core::Tolerance;

use crate::checks::CheckResult;
use crate::instance::SCHEMA_VERSION;
use crate::json;
use crate::suite::SuiteReport;

pub const TOOL: &str = concat!("ckgframe ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToleranceOut {
    pub rel: f64,
    pub abs: f64,
}

impl From<&Tolerance> for ToleranceOut {
    fn from(t: &Tolerance) -> Self {
        ToleranceOut { rel: t.rel, abs: t.abs }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerance: ToleranceOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub schema_version: &'static str,
    pub tool: &'static str,
    pub command: &'static str,
    pub provenance: Provenance,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRun {
    pub schema_version: &'static str,
    pub tool: &'static str,
    pub command: &'static str,
    pub provenance: Provenance,
    pub suites: Vec<SuiteReport>,
    /// Counted in trials across all suites.
    pub summary: Summary,
}

impl CheckReport {
    pub fn new(input: &str, tol: &Tolerance, checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().filter(|c| c.pass).count();
        CheckReport {
            schema_version: SCHEMA_VERSION,
            tool: TOOL,
            command: "check",
            provenance: Provenance {
                input: Some(input.into()),
                suite: None,
                trials: None,
                seed: None,
                tolerance: tol.into(),
            },
            summary: Summary {
                total: checks.len(),
                passed,
                failed: checks.len() - passed,
            },
            checks,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        json::to_string(self)
    }
}

impl SuiteRun {
    pub fn new(suite: &str, trials: usize, seed: u64, tol: &Tolerance, suites: Vec<SuiteReport>) -> Self {
        let passed = suites.iter().map(|s| s.passed).sum();
        let failed = suites.iter().map(|s| s.failed).sum();
        SuiteRun {
            schema_version: SCHEMA_VERSION,
            tool: TOOL,
            command: "suite",
            provenance: Provenance {
                input: None,
                suite: Some(suite.into()),
                trials: Some(trials),
                seed: Some(seed),
                tolerance: tol.into(),
            },
            suites,
            summary: Summary {
                total: passed + failed,
                passed,
                failed,
            },
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        json::to_string(self)
    }
}
