//! Experiment reports.
//!
//! A report is a pure function of its parameters and seed: no timestamps,
//! hostnames or thread counts. Wall time is attached only on request, and
//! such a report is then no longer reproducible byte for byte.

use std::collections::BTreeMap;

use fejer_core::{Rational, Scalar};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Provenance;
use crate::error::LabResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Nothing asserted failed, and the experiment's main output is a
    /// measured quantity rather than a verdict.
    Informative,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Informative => "informative",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A cell (and index) where a check was decided, usually the first failure
/// or the extremal case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

/// One point of a long-format table, ready for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub series: String,
    pub label: String,
    pub x: f64,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub experiment: String,
    pub parameters: BTreeMap<String, Value>,
    pub conventions: Vec<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub self_test: bool,
    pub checks: Vec<Check>,
    pub witnesses: Vec<Witness>,
    pub constants: BTreeMap<String, Constant>,
    pub rows: Vec<Row>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<u64>,
}

impl ExperimentReport {
    pub fn new(experiment: &str) -> Self {
        ExperimentReport {
            provenance: None,
            experiment: experiment.to_string(),
            parameters: BTreeMap::new(),
            conventions: Vec::new(),
            status: Status::Pass,
            self_test: false,
            checks: Vec::new(),
            witnesses: Vec::new(),
            constants: BTreeMap::new(),
            rows: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn witness(&mut self, w: Witness) {
        self.witnesses.push(w);
    }

    pub fn constant(&mut self, name: impl Into<String>, value: f64) {
        self.constants.insert(name.into(), Constant { value, exact: None });
    }

    pub fn constant_exact(&mut self, name: impl Into<String>, value: &Rational) {
        self.constants.insert(
            name.into(),
            Constant {
                value: value.to_f64(),
                exact: Some(value.to_string()),
            },
        );
    }

    pub fn row(&mut self, series: &str, label: impl Into<String>, x: f64, value: f64) {
        self.rows.push(Row {
            series: series.to_string(),
            label: label.into(),
            x,
            value,
            exact: None,
        });
    }

    pub fn row_exact(&mut self, series: &str, label: impl Into<String>, x: f64, value: &Rational) {
        self.rows.push(Row {
            series: series.to_string(),
            label: label.into(),
            x,
            value: value.to_f64(),
            exact: Some(value.to_string()),
        });
    }

    /// Sets the status from the checks: any failure is `Fail`, otherwise
    /// `Informative` or `Pass`.
    pub fn finish(&mut self, informative: bool) {
        self.status = if self.checks.iter().any(|c| !c.passed) {
            Status::Fail
        } else if informative {
            Status::Informative
        } else {
            Status::Pass
        };
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> LabResult<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Long-format CSV of the rows, preceded by `#` comment lines carrying
    /// the provenance, status and checks.
    pub fn to_csv(&self) -> LabResult<String> {
        let mut head = String::new();
        if let Some(p) = &self.provenance {
            head.push_str(&p.comment_lines());
        }
        head.push_str(&format!("# experiment={}\n# status={}\n", self.experiment, self.status.as_str()));
        for c in &self.checks {
            head.push_str(&format!(
                "# check {} {}: {}\n",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        for (k, c) in &self.constants {
            match &c.exact {
                Some(e) => head.push_str(&format!("# constant {k}={} ({e})\n", c.value)),
                None => head.push_str(&format!("# constant {k}={}\n", c.value)),
            }
        }
        let mut buf = head.into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(["series", "label", "x", "value", "exact"])?;
            for r in &self.rows {
                w.write_record([
                    r.series.clone(),
                    r.label.clone(),
                    r.x.to_string(),
                    r.value.to_string(),
                    r.exact.clone().unwrap_or_default(),
                ])?;
            }
            w.flush()?;
        }
        String::from_utf8(buf).map_err(|e| crate::error::LabError::format(e.to_string()))
    }

    /// One line for the terminal.
    pub fn summary(&self) -> String {
        let failed: Vec<&str> = self.failed_checks().map(|c| c.name.as_str()).collect();
        if failed.is_empty() {
            format!("{}: {} ({} checks)", self.experiment, self.status.as_str(), self.checks.len())
        } else {
            format!(
                "{}: {} ({} of {} checks failed: {})",
                self.experiment,
                self.status.as_str(),
                failed.len(),
                self.checks.len(),
                failed.join(", ")
            )
        }
    }
}
