//! JSON report types.

use std::path::Path;

use octavic::embedding::Calibration;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl CheckResult {
    /// `"<name>: <status>"`, the line printed for each check.
    pub fn summary(&self) -> String {
        format!("{}: {}", self.name, self.status)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
    /// One `"<check>: pass|fail"` line per check.
    pub summary: Vec<String>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn new(suite: &str, config_hash: &str, calibration: Option<Calibration>, checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().all(|c| c.status == Status::Pass);
        let summary = checks.iter().map(CheckResult::summary).collect();
        SuiteReport {
            suite: suite.to_string(),
            config_hash: config_hash.to_string(),
            calibration,
            summary,
            checks,
            passed,
        }
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub config_hash: String,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn new(config_hash: &str, suites: Vec<SuiteReport>) -> Self {
        let passed = suites.iter().all(|s| s.passed);
        VerifyReport { config_hash: config_hash.to_string(), suites, passed }
    }

    pub fn first_failure(&self) -> Option<(&str, &CheckResult)> {
        self.suites.iter().find_map(|s| s.first_failure().map(|c| (s.suite.as_str(), c)))
    }
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(crate::config::sha256_bytes(&std::fs::read(path)?))
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}
