use std::path::Path;

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "fockdeform-report/1";

/// How `max_deviation` is compared against `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// identity: deviation must stay within tolerance
    #[serde(rename = "<=")]
    AtMost,
    /// detection probe: deviation must exceed the threshold
    #[serde(rename = ">")]
    Exceeds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    pub anchor: String,
    /// `None` when the check could not be evaluated
    pub max_deviation: Option<f64>,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl CheckRecord {
    pub fn new(suite: &str, check: impl Into<String>, anchor: &str, deviation: f64, tolerance: f64, relation: Relation) -> Self {
        let pass = deviation.is_finite()
            && match relation {
                Relation::AtMost => deviation <= tolerance,
                Relation::Exceeds => deviation > tolerance,
            };
        CheckRecord {
            suite: suite.to_string(),
            check: check.into(),
            anchor: anchor.to_string(),
            max_deviation: deviation.is_finite().then_some(deviation),
            tolerance,
            relation,
            pass,
            error: None,
        }
    }

    /// Record for a check that could not be evaluated.
    pub fn errored(
        suite: &str,
        check: impl Into<String>,
        anchor: &str,
        tolerance: f64,
        relation: Relation,
        error: impl ToString,
    ) -> Self {
        CheckRecord {
            suite: suite.to_string(),
            check: check.into(),
            anchor: anchor.to_string(),
            max_deviation: None,
            tolerance,
            relation,
            pass: false,
            error: Some(error.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub seed: u64,
    pub overall_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_seconds: Option<f64>,
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn new(seed: u64, records: Vec<CheckRecord>, runtime_seconds: Option<f64>) -> Self {
        SuiteReport {
            schema: SCHEMA.to_string(),
            seed,
            overall_pass: !records.is_empty() && records.iter().all(|r| r.pass),
            runtime_seconds,
            records,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Writes the report as JSON.
pub fn emit_report(report: &SuiteReport, path: &Path) -> std::io::Result<()> {
    let mut text = report.to_json();
    text.push('\n');
    std::fs::write(path, text)
}
