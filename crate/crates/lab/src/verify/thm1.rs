//! Desk-scale evidence for boundedness of `sup_n |sigma_n^kappa f| / (n+1)^{1/p-2}`
//! from `H_p` to `L_p`: the two hypotheses of the atomic criterion.
//!
//! * quasi-locality: `int_{complement of I_N} |T a|^p` over seeded `p`-atoms on
//!   `I_N`, maximised over seeds, must not grow with `N`;
//! * `L_inf` boundedness: `||T f||_inf <= C ||f||_inf` on random bounded `f`,
//!   with the fitted `C` below the kernel bound `max_n ||K_n||_1 / phi(n)`.
//!
//! Along the way the exact vanishing `sigma_n^kappa a = 0` for `n <= 2^N` is
//! checked on every atom.

use fejer_core::operators::{apply_fejer_multipliers, maximal_fejer};
use fejer_core::spaces::make_atom;
use fejer_core::transform::fourier_coeffs;
use fejer_core::{Convention, Exponent, GridFn, Rational, Resolution, Scalar, SystemId, WeightSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{param_error, resolution, Harness};
use crate::error::LabResult;
use crate::report::{ExperimentReport, Witness};

#[derive(Debug, Clone, PartialEq)]
pub struct Thm1Params {
    pub p_values: Vec<Exponent>,
    pub levels: Vec<u32>,
    /// `M = max N + headroom`.
    pub headroom: u32,
    /// Truncation of the supremum; defaults to `2^M`.
    pub n_max: Option<u64>,
    pub trials: u64,
    /// Atom `i` uses seed `seed + i`; seed 0 is the Haar atom.
    pub seed: u64,
    pub linf_samples: u64,
    /// No-growth tolerance: the statistic at the largest `N` may exceed the
    /// largest value at smaller `N` by at most this factor.
    pub growth_tolerance: f64,
    pub convention: Convention,
}

impl Default for Thm1Params {
    fn default() -> Self {
        Thm1Params {
            p_values: vec![Exponent::new(1, 4).expect("valid"), Exponent::new(2, 5).expect("valid")],
            levels: vec![2, 3, 4, 5],
            headroom: 4,
            n_max: None,
            trials: 100,
            seed: 0,
            linf_samples: 50,
            growth_tolerance: 1.1,
            convention: Convention::ZeroBased,
        }
    }
}

struct AtomOutcome {
    seed: u64,
    valid: Result<(), String>,
    /// Smallest `n <= 2^N` with `sigma_n a != 0`.
    nonvanishing: Option<u64>,
    statistic: f64,
}

fn complement_integral(g: &GridFn<f64>, level: u32, p: f64) -> f64 {
    let mask = (1usize << level) - 1;
    let sum: f64 = g
        .values()
        .iter()
        .enumerate()
        .filter(|(u, _)| u & mask != 0)
        .map(|(_, v)| v.abs().powf(p))
        .sum();
    sum / g.resolution().cells() as f64
}

fn run_atom(
    level: u32,
    p: Exponent,
    res: Resolution,
    seed: u64,
    n_max: u64,
    convention: Convention,
    corrupt: bool,
) -> LabResult<AtomOutcome> {
    let mut atom = make_atom(level, p, res, seed)?;
    if corrupt {
        // a bump at the origin breaks the zero mean
        let mut v = atom.values.clone().into_values();
        v[0] += Rational::from_integer(1.into());
        atom.values = GridFn::new(res, v)?;
    }
    let valid = atom.validate().map_err(|e| e.to_string());

    let coeffs = fourier_coeffs(&atom.values, SystemId::Kaczmarz);
    let mut nonvanishing = None;
    for n in 1..=atom.vanishing_order() {
        if apply_fejer_multipliers(&coeffs, n, convention)?
            .coeffs()
            .iter()
            .any(|c| !num_traits::Zero::is_zero(c))
        {
            nonvanishing = Some(n);
            break;
        }
    }

    let g = maximal_fejer(&atom.values.to_float(), SystemId::Kaczmarz, n_max, &WeightSpec::Power(p), convention)?;
    Ok(AtomOutcome {
        seed,
        valid,
        nonvanishing,
        statistic: complement_integral(&g, level, p.as_f64()),
    })
}

pub fn run(params: &Thm1Params, harness: &Harness) -> LabResult<ExperimentReport> {
    if params.p_values.is_empty() || params.levels.is_empty() {
        return Err(param_error("p", "need at least one p and one N"));
    }
    for p in &params.p_values {
        if !p.below_half() {
            return Err(param_error("p", format!("{p} is outside (0, 1/2)")));
        }
    }
    if params.levels.contains(&0) {
        return Err(param_error("N", "atom levels start at N = 1"));
    }
    if params.trials == 0 {
        return Err(param_error("trials", "need at least one trial"));
    }
    if params.growth_tolerance.is_nan() || params.growth_tolerance < 1.0 {
        return Err(param_error("growth_tolerance", "must be >= 1"));
    }
    let mut levels = params.levels.clone();
    levels.sort_unstable();
    levels.dedup();
    let max_level = *levels.last().expect("nonempty");
    let headroom = params.headroom.max(1);
    let res = resolution(max_level + headroom)?;
    let n_max = params.n_max.unwrap_or(res.cells() as u64);
    res.check_index(n_max.saturating_sub(1))?;
    if n_max <= 1 << max_level {
        return Err(param_error(
            "n_max",
            format!("n_max = {n_max} must exceed 2^N = {} for the sweep to see anything", 1u64 << max_level),
        ));
    }

    let mut report = ExperimentReport::new("thm1");
    report.param("p", params.p_values.iter().map(|p| p.to_string()).collect::<Vec<_>>());
    report.param("N", levels.clone());
    report.param("resolution", res.bits());
    report.param("n_max", n_max);
    report.param("trials", params.trials);
    report.param("seed", params.seed);
    report.param("linf_samples", params.linf_samples);
    report.param("growth_tolerance", params.growth_tolerance);
    report.param("weight", "(n+1)^(1/p-2)");
    report.conventions = vec![params.convention.as_str().to_string()];

    // L1 norms of the Kaczmarz kernels, shared by every p
    let l1 = (1..=n_max)
        .into_par_iter()
        .map(|n| -> LabResult<f64> {
            let k = harness.memo.get(SystemId::Kaczmarz, n, res, params.convention)?;
            Ok(k.l1_norm().to_f64())
        })
        .collect::<LabResult<Vec<_>>>()?;

    for &p in &params.p_values {
        let ps = p.to_string();
        let mut per_level = Vec::new();
        let mut all_valid = true;
        let mut all_vanish = true;

        for &level in &levels {
            let outcomes = (0..params.trials)
                .into_par_iter()
                .map(|i| {
                    run_atom(
                        level,
                        p,
                        res,
                        params.seed + i,
                        n_max,
                        params.convention,
                        harness.self_test,
                    )
                })
                .collect::<LabResult<Vec<_>>>()?;

            if let Some(o) = outcomes.iter().find(|o| o.valid.is_err()) {
                all_valid = false;
                report.witness(Witness {
                    check: format!("atoms valid (p={ps})"),
                    cell: None,
                    n: None,
                    value: format!("N={level}, seed {}: {}", o.seed, o.valid.clone().unwrap_err()),
                    expected: None,
                });
            }
            if let Some(o) = outcomes.iter().find(|o| o.nonvanishing.is_some()) {
                all_vanish = false;
                report.witness(Witness {
                    check: format!("sigma_n a = 0 for n <= 2^N (p={ps})"),
                    cell: None,
                    n: o.nonvanishing,
                    value: format!("N={level}, seed {}: sigma_n a is nonzero", o.seed),
                    expected: Some("0".into()),
                });
            }
            let best = outcomes
                .iter()
                .max_by(|a, b| a.statistic.total_cmp(&b.statistic).then(b.seed.cmp(&a.seed)))
                .expect("trials > 0");
            report.row("sweep_statistic", format!("p={ps}"), level as f64, best.statistic);
            report.constant(format!("sweep statistic p={ps} N={level}"), best.statistic);
            report.witness(Witness {
                check: format!("sweep maximum (p={ps}, N={level})"),
                cell: None,
                n: None,
                value: format!("{} at seed {}", best.statistic, best.seed),
                expected: None,
            });
            per_level.push((level, best.statistic));
        }

        report.check(
            format!("atoms valid (p={ps})"),
            all_valid,
            format!("{} atoms per N checked exactly for support, zero mean and sup bound", params.trials),
        );
        report.check(
            format!("sigma_n a = 0 for n <= 2^N (p={ps})"),
            all_vanish,
            "exact Kaczmarz coefficients times the Fejér multipliers",
        );

        if per_level.len() >= 2 {
            let (top_level, top) = *per_level.last().expect("nonempty");
            let below = per_level[..per_level.len() - 1]
                .iter()
                .map(|&(_, s)| s)
                .fold(0.0f64, f64::max);
            let ratio = top / below;
            report.constant(format!("growth ratio p={ps}"), ratio);
            report.check(
                format!("no growth in N (p={ps})"),
                ratio <= params.growth_tolerance,
                format!(
                    "statistic at N={top_level} is {ratio:.4}x the maximum over smaller N (tolerance {})",
                    params.growth_tolerance
                ),
            );
        }

        // L_inf: fitted constant against the kernel bound
        let weight = WeightSpec::Power(p);
        let mut kernel_bound = 0.0f64;
        for (i, norm) in l1.iter().enumerate() {
            kernel_bound = kernel_bound.max(norm / weight.weight(i as u64 + 1)?);
        }
        let ratios = (0..params.linf_samples)
            .into_par_iter()
            .map(|i| -> LabResult<f64> {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                rng.set_stream(i + 1);
                let f = GridFn::from_fn(res, |_| rng.random_range(-1.0..=1.0))?;
                let g = maximal_fejer(&f, SystemId::Kaczmarz, n_max, &weight, params.convention)?;
                Ok(g.max_abs() / f.max_abs())
            })
            .collect::<LabResult<Vec<_>>>()?;
        let fitted = ratios.iter().copied().fold(0.0f64, f64::max);
        report.constant(format!("L_inf constant p={ps}"), fitted);
        report.constant(format!("L_inf kernel bound p={ps}"), kernel_bound);
        if params.linf_samples > 0 {
            report.check(
                format!("L_inf bound (p={ps})"),
                fitted <= kernel_bound * (1.0 + 1e-12),
                format!(
                    "C = {fitted:.6} over {} random f, kernel bound max_n ||K_n||_1/phi(n) = {kernel_bound:.6}",
                    params.linf_samples
                ),
            );
        }
    }

    report.finish(false);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    fn small() -> Thm1Params {
        Thm1Params {
            levels: vec![1, 2],
            headroom: 3,
            trials: 6,
            linf_samples: 4,
            growth_tolerance: 100.0,
            ..Default::default()
        }
    }

    #[test]
    fn small_sweep_passes_exact_checks() {
        let r = run(&small(), &Harness::new()).unwrap();
        assert_eq!(r.status, Status::Pass, "{:?}", r.checks);
        assert!(r.constants["sweep statistic p=1/4 N=2"].value > 0.0);
    }

    #[test]
    fn self_test_breaks_the_atoms() {
        let r = run(&small(), &Harness::self_test()).unwrap();
        assert_eq!(r.status, Status::Fail);
        let failed: Vec<&str> = r.failed_checks().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"atoms valid (p=1/4)"));
        assert!(failed.contains(&"sigma_n a = 0 for n <= 2^N (p=1/4)"));
    }

    #[test]
    fn zero_function_gives_zero_statistic() {
        let res = Resolution::new(4).unwrap();
        let g = maximal_fejer(
            &GridFn::<f64>::zero(res).unwrap(),
            SystemId::Kaczmarz,
            16,
            &WeightSpec::Power(Exponent::new(1, 4).unwrap()),
            Convention::ZeroBased,
        )
        .unwrap();
        assert_eq!(complement_integral(&g, 2, 0.25), 0.0);
    }

    #[test]
    fn rejects_p_at_or_above_half() {
        let p = Thm1Params {
            p_values: vec![Exponent::new(1, 2).unwrap()],
            ..small()
        };
        assert!(run(&p, &Harness::new()).is_err());
    }
}
