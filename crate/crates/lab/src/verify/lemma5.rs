//! `q_{A-1}|K_{q_{A-1}}(x)| >= 2^{2m+2s-3}` on every two-spike pattern cell,
//! exactly, per convention.

use fejer_core::kernels::q_seq;
use fejer_core::{Convention, PatternSet, Rational, SystemId};
use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::{conventions_value, param_error, resolution, Harness};
use crate::error::LabResult;
use crate::report::{ExperimentReport, Witness};

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma5Params {
    pub a_min: u32,
    pub a_max: u32,
    pub conventions: Vec<Convention>,
}

impl Default for Lemma5Params {
    fn default() -> Self {
        Lemma5Params {
            a_min: 3,
            a_max: 5,
            conventions: Convention::BOTH.to_vec(),
        }
    }
}

struct Outcome {
    convention: Convention,
    a: u32,
    n: u64,
    cells: usize,
    /// Smallest `|n K_n| / bound` over all pattern cells.
    min_ratio: Rational,
    /// First violation: (cell, m, s, |n K_n|, bound).
    violation: Option<(usize, u32, u32, i64, i64)>,
    measure: Rational,
}

pub fn run(params: &Lemma5Params, harness: &Harness) -> LabResult<ExperimentReport> {
    if params.a_min < 3 || params.a_min > params.a_max {
        return Err(param_error(
            "A",
            format!("need 3 <= A_min <= A_max, got {}..{}", params.a_min, params.a_max),
        ));
    }
    resolution(2 * params.a_max)?;

    let mut report = ExperimentReport::new("lemma5");
    report.param("A_min", params.a_min);
    report.param("A_max", params.a_max);
    report.param("resolution", "2A");
    report.param("conventions", conventions_value(&params.conventions));
    report.conventions = params.conventions.iter().map(|c| c.as_str().to_string()).collect();

    let jobs: Vec<(Convention, u32)> = params
        .conventions
        .iter()
        .flat_map(|&c| (params.a_min..=params.a_max).map(move |a| (c, a)))
        .collect();

    let outcomes = jobs
        .par_iter()
        .map(|&(convention, a)| -> LabResult<Outcome> {
            let res = resolution(2 * a)?;
            // self-test keeps only the leading term of q_{A-1}
            let n = if harness.self_test { 1 << (2 * a - 2) } else { q_seq(a - 1) };
            let k = harness.memo.get(SystemId::Paley, n, res, convention)?;
            let v = k.scaled().values();
            let mut min_ratio: Option<Rational> = None;
            let mut violation = None;
            let mut cells = 0;
            let mut measure = Rational::zero();
            for m in 0..=a - 3 {
                for s in m + 2..=a - 1 {
                    let pattern = PatternSet::two_spike(res, a, m, s)?;
                    measure += pattern.measure();
                    let bound = 1i64 << (2 * m + 2 * s - 3);
                    for u in pattern.cells() {
                        cells += 1;
                        let val = v[u].abs();
                        if val < bound && violation.is_none() {
                            violation = Some((u, m, s, val, bound));
                        }
                        let r = Rational::new(BigInt::from(val), BigInt::from(bound));
                        if min_ratio.as_ref().is_none_or(|x| r < *x) {
                            min_ratio = Some(r);
                        }
                    }
                }
            }
            Ok(Outcome {
                convention,
                a,
                n,
                cells,
                min_ratio: min_ratio.expect("patterns are nonempty for A >= 3"),
                violation,
                measure,
            })
        })
        .collect::<LabResult<Vec<_>>>()?;

    for &convention in &params.conventions {
        let c = convention.as_str();
        let mine: Vec<&Outcome> = outcomes.iter().filter(|o| o.convention == convention).collect();
        let bad: Vec<&Outcome> = mine.iter().copied().filter(|o| o.violation.is_some()).collect();
        let cells: usize = mine.iter().map(|o| o.cells).sum();
        report.check(
            format!("lower bound ({c})"),
            bad.is_empty(),
            if bad.is_empty() {
                format!("holds on all {cells} pattern cells for A in {}..={}", params.a_min, params.a_max)
            } else {
                format!("violated for A in {:?}", bad.iter().map(|o| o.a).collect::<Vec<_>>())
            },
        );
        if let Some(o) = bad.first() {
            let (u, m, s, val, bound) = o.violation.expect("filtered");
            report.witness(Witness {
                check: format!("lower bound ({c})"),
                cell: Some(u),
                n: Some(o.n),
                value: format!("{val} (m={m}, s={s})"),
                expected: Some(format!(">= {bound}")),
            });
        }
        for o in &mine {
            report.row_exact("min_ratio", c, o.a as f64, &o.min_ratio);
        }
    }

    // the pattern sets do not depend on the convention
    let mut seen = Vec::new();
    for o in &outcomes {
        if !seen.contains(&o.a) {
            seen.push(o.a);
            report.row_exact("pattern_measure", "sum over (m, s)", o.a as f64, &o.measure);
            report.constant_exact(format!("pattern measure A={}", o.a), &o.measure);
        }
    }

    report.finish(false);
    Ok(report)
}
