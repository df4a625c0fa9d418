//! The four-term decomposition of `n K_n^kappa`: an exact identity under the
//! one-based convention, and an exactly reported residual under zero-based.

use fejer_core::kernels::skvortsov_terms;
use fejer_core::{Convention, GridFn, SystemId};
use rayon::prelude::*;

use super::{param_error, resolution, Harness};
use crate::error::LabResult;
use crate::report::{ExperimentReport, Witness};

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma4Params {
    pub n_min: u64,
    pub n_max: u64,
    pub resolution: u32,
}

impl Default for Lemma4Params {
    fn default() -> Self {
        Lemma4Params {
            n_min: 1,
            n_max: 256,
            resolution: 9,
        }
    }
}

struct Outcome {
    n: u64,
    /// First cell where the one-based sum differs: (cell, terms, n K_n).
    one_based_mismatch: Option<(usize, i64, i64)>,
    /// Zero-based `terms - n K_n`: `Some(c)` if constant.
    residual_constant: Option<i64>,
    residual_max: i64,
    tail_zero: [bool; 2],
}

fn constant_value(g: &GridFn<i64>) -> Option<i64> {
    let v = g.values();
    v.iter().all(|&x| x == v[0]).then_some(v[0])
}

pub fn run(params: &Lemma4Params, harness: &Harness) -> LabResult<ExperimentReport> {
    if params.n_min == 0 || params.n_min > params.n_max {
        return Err(param_error(
            "n",
            format!("need 1 <= n_min <= n_max, got {}..{}", params.n_min, params.n_max),
        ));
    }
    let res = resolution(params.resolution)?;
    res.check_index(params.n_max - 1)?;

    let mut report = ExperimentReport::new("lemma4");
    report.param("n_min", params.n_min);
    report.param("n_max", params.n_max);
    report.param("resolution", params.resolution);
    report.conventions = Convention::BOTH.iter().map(|c| c.as_str().to_string()).collect();

    let outcomes = (params.n_min..=params.n_max)
        .into_par_iter()
        .map(|n| -> LabResult<Outcome> {
            let one = skvortsov_terms(n, res, Convention::OneBased)?;
            let mut total = one.total();
            if harness.self_test {
                total = total.sub_int(&one.constant)?;
            }
            let k1 = harness.memo.get(SystemId::Kaczmarz, n, res, Convention::OneBased)?;
            let one_based_mismatch = total
                .values()
                .iter()
                .zip(k1.scaled().values())
                .position(|(a, b)| a != b)
                .map(|u| (u, total.values()[u], k1.scaled().values()[u]));

            let zero = skvortsov_terms(n, res, Convention::ZeroBased)?;
            let k0 = harness.memo.get(SystemId::Kaczmarz, n, res, Convention::ZeroBased)?;
            let residual = zero.total().sub_int(k0.scaled())?;
            let residual_max = residual.values().iter().map(|v| v.abs()).max().unwrap_or(0);

            let tail_zero = [&zero, &one].map(|t| t.tail.values().iter().all(|&v| v == 0));
            Ok(Outcome {
                n,
                one_based_mismatch,
                residual_constant: constant_value(&residual),
                residual_max,
                tail_zero,
            })
        })
        .collect::<LabResult<Vec<_>>>()?;

    let bad: Vec<&Outcome> = outcomes.iter().filter(|o| o.one_based_mismatch.is_some()).collect();
    report.check(
        "one-based identity",
        bad.is_empty(),
        format!(
            "sum of the four terms equals n K_n on every cell for {}..={} at M = {}; {} of {} n disagree",
            params.n_min,
            params.n_max,
            params.resolution,
            bad.len(),
            outcomes.len()
        ),
    );
    if let Some(o) = bad.first() {
        let (u, got, want) = o.one_based_mismatch.expect("filtered");
        report.witness(Witness {
            check: "one-based identity".into(),
            cell: Some(u),
            n: Some(o.n),
            value: got.to_string(),
            expected: Some(want.to_string()),
        });
    }

    if let Some(o) = outcomes.iter().find(|o| o.n == 2) {
        report.check(
            "zero-based residual at n = 2",
            o.residual_constant == Some(1),
            match o.residual_constant {
                Some(c) => format!("terms - 2 K_2 is the constant {c} (expected 1)"),
                None => "terms - 2 K_2 is not constant".to_string(),
            },
        );
    }

    let powers: Vec<&Outcome> = outcomes.iter().filter(|o| o.n.is_power_of_two()).collect();
    if !powers.is_empty() {
        let bad: Vec<u64> = powers
            .iter()
            .filter(|o| !o.tail_zero.iter().all(|&z| z))
            .map(|o| o.n)
            .collect();
        report.check(
            "tail vanishes at powers of two",
            bad.is_empty(),
            format!("both conventions, {} powers of two; nonzero tails at {bad:?}", powers.len()),
        );
    }

    let constant_count = outcomes.iter().filter(|o| o.residual_constant.is_some()).count();
    report.constant("zero-based residual constant fraction", constant_count as f64 / outcomes.len() as f64);
    for o in &outcomes {
        match o.residual_constant {
            Some(c) => report.row("zero_based_residual", "constant", o.n as f64, c as f64),
            None => report.row("zero_based_residual_max_abs", "nonconstant", o.n as f64, o.residual_max as f64),
        }
    }

    report.finish(false);
    Ok(report)
}
