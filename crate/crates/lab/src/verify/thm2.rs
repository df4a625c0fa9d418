//! Growth of `R(m) = ||sigma_{q_m}^kappa f_m||_{p,inf} / (phi(q_m) ||f_m||_{H_p})`
//! along `f_m = D_{2^{2m+1}} - D_{2^{2m}}`, at resolution `2m + 1`.
//!
//! Besides the trend, each `m` checks exactly that
//! `|sigma_{q_m}^kappa f_m| = (q_{m-1}/q_m) |K^w_{q_{m-1}} o tau_{2m}|` (zero-based),
//! and that `||f_m||_{H_p} = 2^{2m(1-1/p)}`.

use fejer_core::group::tau;
use fejer_core::kernels::{dirichlet_2pow, fejer, q_seq};
use fejer_core::operators::fejer_mean;
use fejer_core::spaces::{counterexample, hardy_norm, weak_lp};
use fejer_core::{Convention, Exponent, GridFn, Rational, SystemId, WeightSpec};
use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;

use super::{param_error, resolution, Harness};
use crate::error::LabResult;
use crate::report::{ExperimentReport, Witness};

#[derive(Debug, Clone, PartialEq)]
pub struct Thm2Params {
    pub p: Exponent,
    pub m_min: u32,
    pub m_max: u32,
    pub weight: WeightSpec,
    /// Relative tolerance of the fitted exponent against `1/p - 2`.
    pub fit_tolerance: f64,
    /// Relative tolerance of the Hardy norm against `2^{2m(1-1/p)}`.
    pub hardy_tolerance: f64,
}

impl Default for Thm2Params {
    fn default() -> Self {
        Thm2Params {
            p: Exponent::new(1, 4).expect("valid"),
            m_min: 1,
            m_max: 4,
            weight: WeightSpec::Unit,
            fit_tolerance: 0.25,
            hardy_tolerance: 1e-12,
        }
    }
}

struct Outcome {
    m: u32,
    /// First cell where the reduction fails: (cell, |sigma|, rhs).
    reduction_mismatch: Option<(usize, Rational, Rational)>,
    weak: f64,
    hardy: f64,
    phi: f64,
}

impl Outcome {
    fn ratio(&self) -> f64 {
        self.weak / (self.phi * self.hardy)
    }
}

/// Least-squares slope of `y` against `x`.
pub fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn run_m(m: u32, params: &Thm2Params, corrupt: bool) -> LabResult<Outcome> {
    let res = resolution(2 * m + 1)?;
    let f = if corrupt {
        dirichlet_2pow(2 * m + 1, res)?
    } else {
        counterexample(m, res)?.values
    };
    let f = f.to_exact();
    let q = q_seq(m);
    let q_prev = q_seq(m - 1);
    let sigma = fejer_mean(&f, SystemId::Kaczmarz, q, Convention::ZeroBased)?;

    let k_prev = fejer(SystemId::Paley, q_prev, res, Convention::ZeroBased)?;
    let factor = Rational::new(BigInt::from(q_prev), BigInt::from(q));
    let rhs = GridFn::from_fn(res, |u| k_prev.value(tau(2 * m, u)).abs() * factor.clone())?;
    let reduction_mismatch = (0..res.cells())
        .find(|&u| sigma.values()[u].abs() != rhs.values()[u])
        .map(|u| (u, sigma.values()[u].abs(), rhs.values()[u].clone()));

    let p = params.p.as_f64();
    Ok(Outcome {
        m,
        reduction_mismatch,
        weak: weak_lp(&sigma, p)?,
        hardy: hardy_norm(&f, p)?,
        phi: params.weight.weight(q)?,
    })
}

pub fn run(params: &Thm2Params, harness: &Harness) -> LabResult<ExperimentReport> {
    if !params.p.below_half() {
        return Err(param_error("p", format!("{} is outside (0, 1/2)", params.p)));
    }
    if params.m_min == 0 || params.m_min > params.m_max {
        return Err(param_error(
            "m",
            format!("need 1 <= m_min <= m_max, got {}..{}", params.m_min, params.m_max),
        ));
    }
    params.weight.validate()?;
    // exact means at resolution 2m + 1
    resolution(2 * params.m_max + 1)?;
    let exact_cap = fejer_core::limits::cap(fejer_core::Backend::Exact);
    if 2 * params.m_max + 1 > exact_cap {
        return Err(param_error(
            "m",
            format!("m = {} needs resolution {}, above the exact cap {exact_cap}", params.m_max, 2 * params.m_max + 1),
        ));
    }

    let p = params.p.as_f64();
    let target = params.p.power_weight_exponent();

    let mut report = ExperimentReport::new("thm2");
    report.param("p", params.p.to_string());
    report.param("m_min", params.m_min);
    report.param("m_max", params.m_max);
    report.param("resolution", "2m+1");
    report.param("weight", format!("{:?}", params.weight));
    report.param("fit_tolerance", params.fit_tolerance);
    report.param("hardy_tolerance", params.hardy_tolerance);
    report.conventions = vec![Convention::ZeroBased.as_str().to_string()];

    let outcomes = (params.m_min..=params.m_max)
        .into_par_iter()
        .map(|m| run_m(m, params, harness.self_test))
        .collect::<LabResult<Vec<_>>>()?;

    // reduction identity
    let bad: Vec<&Outcome> = outcomes.iter().filter(|o| o.reduction_mismatch.is_some()).collect();
    report.check(
        "reduction to the rotated Paley kernel",
        bad.is_empty(),
        format!(
            "|sigma_(q_m) f_m| = (q_(m-1)/q_m)|K_(q_(m-1)) o tau_2m| on every cell, m in {}..={}",
            params.m_min, params.m_max
        ),
    );
    if let Some(o) = bad.first() {
        let (u, got, want) = o.reduction_mismatch.clone().expect("filtered");
        report.witness(Witness {
            check: "reduction to the rotated Paley kernel".into(),
            cell: Some(u),
            n: Some(q_seq(o.m)),
            value: got.to_string(),
            expected: Some(want.to_string()),
        });
    }

    // Hardy norm of f_m
    let mut worst_hardy = 0.0f64;
    for o in &outcomes {
        let expect = (2.0 * o.m as f64 * (1.0 - 1.0 / p)).exp2();
        worst_hardy = worst_hardy.max((o.hardy / expect - 1.0).abs());
    }
    report.check(
        "Hardy norm of f_m",
        worst_hardy <= params.hardy_tolerance,
        format!("max relative deviation from 2^(2m(1-1/p)) is {worst_hardy:.3e}"),
    );

    for o in &outcomes {
        let x = o.m as f64;
        report.row("weak_norm", "sigma_(q_m) f_m", x, o.weak);
        report.row("hardy_norm", "f_m", x, o.hardy);
        report.row("phi", "phi(q_m)", x, o.phi);
        report.row("R", "weak/(phi hardy)", x, o.ratio());
        report.constant(format!("R(m={})", o.m), o.ratio());
    }

    // divergence condition on phi, numerically: q_m^{1/p-2} / phi(q_m)
    // increasing and at least doubling across the range
    let cond: Vec<f64> = outcomes
        .iter()
        .map(|o| (q_seq(o.m) as f64).powf(target) / o.phi)
        .collect();
    let condition_holds = cond.windows(2).all(|w| w[1] > w[0])
        && cond.len() >= 2
        && cond[cond.len() - 1] >= 2.0 * cond[0];
    report.constant("divergence condition on phi", condition_holds as u8 as f64);
    for (o, c) in outcomes.iter().zip(&cond) {
        report.row("condition", "q_m^(1/p-2)/phi(q_m)", o.m as f64, *c);
    }

    let ratios: Vec<f64> = outcomes.iter().map(Outcome::ratio).collect();
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    if condition_holds {
        report.check(
            "R strictly increasing",
            increasing,
            format!("R over m = {}..={}: {ratios:?}", params.m_min, params.m_max),
        );
    } else {
        report.constant("R strictly increasing (not asserted)", increasing as u8 as f64);
    }

    // exponent of weak/hardy in 2^{2m}; points with a zero mean are skipped
    let points: Vec<(f64, f64)> = outcomes
        .iter()
        .filter(|o| o.weak > 0.0)
        .map(|o| (2.0 * o.m as f64, (o.weak / o.hardy).log2()))
        .collect();
    let skipped: Vec<u32> = outcomes.iter().filter(|o| o.weak <= 0.0).map(|o| o.m).collect();
    match slope(&points) {
        Some(s) => {
            report.constant("fitted exponent", s);
            report.constant("target exponent 1/p-2", target);
            report.check(
                "growth exponent",
                ((s - target) / target).abs() <= params.fit_tolerance,
                format!(
                    "least-squares slope of log2(weak/hardy) against 2m is {s:.4}, target {target:.4} (tolerance {:.0}%); m with zero weak norm skipped: {skipped:?}",
                    params.fit_tolerance * 100.0
                ),
            );
        }
        None => report.check(
            "growth exponent",
            false,
            format!("fewer than two m with nonzero weak norm (skipped {skipped:?})"),
        ),
    }

    report.finish(false);
    Ok(report)
}
