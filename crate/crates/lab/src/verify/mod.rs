//! Experiments that certify the kernel lemmas exactly and reproduce the
//! evidence for both theorems at desk scale.
//!
//! Every experiment returns an [`ExperimentReport`]; work inside an
//! experiment runs on the ambient rayon pool and is merged in parameter
//! order, so reports do not depend on the number of threads.

use std::str::FromStr;

use fejer_core::{Convention, Resolution};
use serde_json::Value;

use crate::error::{LabError, LabResult};
use crate::memo::KernelMemo;
use crate::report::ExperimentReport;

pub mod lemma2;
pub mod lemma3;
pub mod lemma4;
pub mod lemma5;
pub mod thm1;
pub mod thm2;

pub use lemma2::Lemma2Params;
pub use lemma3::Lemma3Params;
pub use lemma4::Lemma4Params;
pub use lemma5::Lemma5Params;
pub use thm1::Thm1Params;
pub use thm2::Thm2Params;

/// Shared state for a batch of experiments.
#[derive(Debug, Default)]
pub struct Harness {
    pub memo: KernelMemo,
    /// Corrupt one input per experiment; a working harness then reports `fail`.
    pub self_test: bool,
}

impl Harness {
    pub fn new() -> Self {
        Harness::default()
    }

    pub fn self_test() -> Self {
        Harness {
            self_test: true,
            ..Harness::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Lemma2(Lemma2Params),
    Lemma3(Lemma3Params),
    Lemma4(Lemma4Params),
    Lemma5(Lemma5Params),
    Thm1(Thm1Params),
    Thm2(Thm2Params),
}

impl Experiment {
    pub const IDS: [&'static str; 6] = ["lemma2", "lemma3", "lemma4", "lemma5", "thm1", "thm2"];

    /// The experiment with its default parameters.
    pub fn default_for(id: &str) -> LabResult<Self> {
        Ok(match id {
            "lemma2" => Experiment::Lemma2(Lemma2Params::default()),
            "lemma3" => Experiment::Lemma3(Lemma3Params::default()),
            "lemma4" => Experiment::Lemma4(Lemma4Params::default()),
            "lemma5" => Experiment::Lemma5(Lemma5Params::default()),
            "thm1" => Experiment::Thm1(Thm1Params::default()),
            "thm2" => Experiment::Thm2(Thm2Params::default()),
            _ => return Err(LabError::format(format!("unknown experiment `{id}`"))),
        })
    }

    pub fn id(&self) -> &'static str {
        match self {
            Experiment::Lemma2(_) => "lemma2",
            Experiment::Lemma3(_) => "lemma3",
            Experiment::Lemma4(_) => "lemma4",
            Experiment::Lemma5(_) => "lemma5",
            Experiment::Thm1(_) => "thm1",
            Experiment::Thm2(_) => "thm2",
        }
    }

    pub fn run(&self, harness: &Harness) -> LabResult<ExperimentReport> {
        let mut report = match self {
            Experiment::Lemma2(p) => lemma2::run(p, harness),
            Experiment::Lemma3(p) => lemma3::run(p, harness),
            Experiment::Lemma4(p) => lemma4::run(p, harness),
            Experiment::Lemma5(p) => lemma5::run(p, harness),
            Experiment::Thm1(p) => thm1::run(p, harness),
            Experiment::Thm2(p) => thm2::run(p, harness),
        }?;
        report.self_test = harness.self_test;
        Ok(report)
    }
}

/// Parses `"a..b"` (inclusive), `"a..=b"`, a single value, or a comma list.
pub fn parse_range(s: &str) -> LabResult<Vec<u64>> {
    let bad = || LabError::format(format!("`{s}` is not a range (try `1..4` or `2,3,5`)"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| bad()))
        .collect::<LabResult<Vec<_>>>()?;
    if v.is_empty() {
        return Err(bad());
    }
    Ok(v)
}

/// `"both"`, or a single convention name.
pub fn parse_conventions(s: &str) -> LabResult<Vec<Convention>> {
    if s == "both" {
        return Ok(Convention::BOTH.to_vec());
    }
    Ok(vec![Convention::from_str(s)?])
}

pub(crate) fn conventions_value(c: &[Convention]) -> Value {
    Value::from(c.iter().map(|c| c.as_str()).collect::<Vec<_>>())
}

pub(crate) fn resolution(bits: u32) -> LabResult<Resolution> {
    Ok(Resolution::new(bits)?)
}

pub(crate) fn param_error(name: &'static str, detail: impl Into<String>) -> LabError {
    LabError::Core(fejer_core::Error::InvalidParameter {
        name,
        detail: detail.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_range("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_range("7").unwrap(), vec![7]);
        assert_eq!(parse_range("2, 3,5").unwrap(), vec![2, 3, 5]);
        assert!(parse_range("4..1").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn conventions() {
        assert_eq!(parse_conventions("both").unwrap().len(), 2);
        assert_eq!(parse_conventions("one-based").unwrap(), vec![Convention::OneBased]);
        assert!(parse_conventions("half-based").is_err());
    }
}
