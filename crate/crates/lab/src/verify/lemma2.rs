//! The piecewise formula for `K_{2^A}^w`, cell by cell against brute force.

use fejer_core::kernels::{center_constant, fejer_closed_2pow_paley, printed_center_constant};
use fejer_core::{Convention, Rational, SystemId};
use rayon::prelude::*;

use super::{conventions_value, param_error, resolution, Harness};
use crate::error::LabResult;
use crate::report::{ExperimentReport, Witness};

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Params {
    pub a_min: u32,
    pub a_max: u32,
    pub resolution: u32,
    pub conventions: Vec<Convention>,
}

impl Default for Lemma2Params {
    fn default() -> Self {
        Lemma2Params {
            a_min: 1,
            a_max: 10,
            resolution: 11,
            conventions: Convention::BOTH.to_vec(),
        }
    }
}

struct Outcome {
    convention: Convention,
    a: u32,
    off_mismatch: Option<(usize, Rational, Rational)>,
    center: Rational,
    center_mismatch: Option<(usize, Rational)>,
}

pub fn run(params: &Lemma2Params, harness: &Harness) -> LabResult<ExperimentReport> {
    if params.a_min == 0 || params.a_min > params.a_max {
        return Err(param_error("A", format!("need 1 <= A_min <= A_max, got {}..{}", params.a_min, params.a_max)));
    }
    if params.a_max > params.resolution {
        return Err(param_error(
            "A",
            format!("A_max = {} exceeds the resolution {}", params.a_max, params.resolution),
        ));
    }
    let res = resolution(params.resolution)?;

    let mut report = ExperimentReport::new("lemma2");
    report.param("A_min", params.a_min);
    report.param("A_max", params.a_max);
    report.param("resolution", params.resolution);
    report.conventions = params.conventions.iter().map(|c| c.as_str().to_string()).collect();
    report.param("conventions", conventions_value(&params.conventions));

    let jobs: Vec<(Convention, u32)> = params
        .conventions
        .iter()
        .flat_map(|&c| (params.a_min..=params.a_max).map(move |a| (c, a)))
        .collect();

    let outcomes = jobs
        .par_iter()
        .map(|&(convention, a)| -> LabResult<Outcome> {
            let kernel = harness.memo.get(SystemId::Paley, 1 << a, res, convention)?;
            let expected_center = if harness.self_test {
                printed_center_constant(a)
            } else {
                center_constant(a, convention)
            };
            let mask = (1usize << a) - 1;
            let mut off_mismatch = None;
            let mut center_mismatch = None;
            for z in 0..res.cells() {
                let brute = kernel.value(z);
                if z & mask == 0 {
                    if center_mismatch.is_none() && brute != expected_center {
                        center_mismatch = Some((z, brute));
                    }
                } else if off_mismatch.is_none() {
                    let closed = fejer_closed_2pow_paley(a, z, res, convention)?;
                    if closed != brute {
                        off_mismatch = Some((z, brute, closed));
                    }
                }
            }
            Ok(Outcome {
                convention,
                a,
                off_mismatch,
                center: kernel.value(0),
                center_mismatch,
            })
        })
        .collect::<LabResult<Vec<_>>>()?;

    for &convention in &params.conventions {
        let mine: Vec<&Outcome> = outcomes.iter().filter(|o| o.convention == convention).collect();
        let c = convention.as_str();

        let off_bad: Vec<&Outcome> = mine.iter().copied().filter(|o| o.off_mismatch.is_some()).collect();
        report.check(
            format!("piecewise formula off I_A ({c})"),
            off_bad.is_empty(),
            format!(
                "0 / 2^(t-1) cases compared on every cell outside I_A for A in {}..={}; {} of {} kernels disagree",
                params.a_min,
                params.a_max,
                off_bad.len(),
                mine.len()
            ),
        );
        if let Some(o) = off_bad.first() {
            let (z, brute, closed) = o.off_mismatch.clone().expect("filtered");
            report.witness(Witness {
                check: format!("piecewise formula off I_A ({c})"),
                cell: Some(z),
                n: Some(1 << o.a),
                value: brute.to_string(),
                expected: Some(closed.to_string()),
            });
        }

        let center_bad: Vec<&Outcome> = mine.iter().copied().filter(|o| o.center_mismatch.is_some()).collect();
        let target = if harness.self_test { "2^(A-1)/2" } else { "(2^A -/+ 1)/2" };
        report.check(
            format!("I_A constant ({c})"),
            center_bad.is_empty(),
            format!(
                "brute-force value on I_A compared with {target}; {} of {} kernels disagree",
                center_bad.len(),
                mine.len()
            ),
        );
        if let Some(o) = center_bad.first() {
            let (z, brute) = o.center_mismatch.clone().expect("filtered");
            let expected = if harness.self_test {
                printed_center_constant(o.a)
            } else {
                center_constant(o.a, convention)
            };
            report.witness(Witness {
                check: format!("I_A constant ({c})"),
                cell: Some(z),
                n: Some(1 << o.a),
                value: brute.to_string(),
                expected: Some(expected.to_string()),
            });
        }

        for o in &mine {
            let printed = printed_center_constant(o.a);
            report.row_exact("center_constant", c, o.a as f64, &o.center);
            report.row_exact("printed_center_constant", c, o.a as f64, &printed);
            report.row_exact("deviation_from_printed", c, o.a as f64, &(o.center.clone() - printed));
            report.constant_exact(format!("I_A constant A={} {c}", o.a), &o.center);
        }
    }

    report.finish(false);
    Ok(report)
}
