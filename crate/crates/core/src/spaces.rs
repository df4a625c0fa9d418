//! `L_p` and weak-`L_p` quasinorms, the dyadic martingale maximal function,
//! the Hardy quasinorm, `p`-atoms and the divergence family `f_m`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::{GridFn, Rational, Scalar};
use crate::group::{unit, Resolution};
use crate::kernels::dirichlet_2pow;

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::param("p", alloc::format!("{p} is not a positive exponent")));
    }
    Ok(())
}

/// `(integral |f|^p)^{1/p}`.
pub fn lp_quasinorm<T: Scalar>(f: &GridFn<T>, p: f64) -> Result<f64> {
    check_p(p)?;
    let sum: f64 = f
        .values()
        .iter()
        .map(|v| libm::pow(v.to_f64().abs(), p))
        .sum();
    let mean = sum / f.resolution().cells() as f64;
    Ok(libm::pow(mean, 1.0 / p))
}

/// `sup_{lambda > 0} lambda mu{|f| > lambda}^{1/p}`.
///
/// For a step function the supremum is approached from below each distinct
/// level `v`, so it equals `max_v v mu{|f| >= v}^{1/p}`.
pub fn weak_lp<T: Scalar>(f: &GridFn<T>, p: f64) -> Result<f64> {
    check_p(p)?;
    let mut levels: Vec<T> = f.values().iter().map(|v| v.abs()).filter(|v| !v.is_zero()).collect();
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let cells = f.resolution().cells() as f64;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < levels.len() {
        let mut j = i + 1;
        while j < levels.len() && levels[j] == levels[i] {
            j += 1;
        }
        let measure = j as f64 / cells;
        best = best.max(levels[i].to_f64() * libm::pow(measure, 1.0 / p));
        i = j;
    }
    Ok(best)
}

/// `f^* = max_{0 <= n <= M} |S_{2^n} f|`, with the conditional expectations
/// computed by averaging sibling cells from the finest level down.
pub fn martingale_maximal<T: Scalar>(f: &GridFn<T>) -> GridFn<T> {
    let res = f.resolution();
    let half = T::from_ratio(1, 2);
    let mut level = f.values().to_vec();
    let mut best: Vec<T> = level.iter().map(|v| v.abs()).collect();
    for k in (1..=res.bits()).rev() {
        let bit = 1usize << (k - 1);
        let prev = level.clone();
        for (u, v) in level.iter_mut().enumerate() {
            *v = (prev[u].clone() + prev[u ^ bit].clone()) * half.clone();
        }
        for (b, v) in best.iter_mut().zip(&level) {
            let a = v.abs();
            if a > *b {
                *b = a;
            }
        }
    }
    GridFn::from_parts(res, best)
}

/// `||f^*||_p`.
pub fn hardy_norm<T: Scalar>(f: &GridFn<T>, p: f64) -> Result<f64> {
    lp_quasinorm(&martingale_maximal(f), p)
}

/// A `p`-atom supported on `I_N`, with exact dyadic-rational values.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpec {
    pub level: u32,
    pub p: Exponent,
    pub values: GridFn<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AtomViolation {
    #[error("integral over I_N is {0}, not zero")]
    NonzeroMean(Rational),
    #[error("|a({cell})| = {value} exceeds mu(I_N)^(-1/p)")]
    SupBound { cell: usize, value: Rational },
    #[error("a({cell}) = {value} is nonzero outside I_N")]
    Support { cell: usize, value: Rational },
    #[error("resolution {resolution} cannot hold an atom on I_{level}")]
    Resolution { level: u32, resolution: u32 },
}

/// `|v| <= 2^{N/p}`, decided exactly as `|v|^num <= 2^{N den}`.
pub fn within_atom_bound(v: &Rational, level: u32, p: Exponent) -> bool {
    let a = v.abs();
    let lhs = a.numer().pow(p.numer());
    let rhs = (BigInt::one() << (level as u64 * p.denom() as u64) as usize) * a.denom().pow(p.numer());
    lhs <= rhs
}

impl AtomSpec {
    /// Checks the three axioms: mean zero, `||a||_inf <= mu(I)^{-1/p}`,
    /// support in `I_N`.
    pub fn validate(&self) -> core::result::Result<(), AtomViolation> {
        let res = self.values.resolution();
        if self.level > res.bits() {
            return Err(AtomViolation::Resolution {
                level: self.level,
                resolution: res.bits(),
            });
        }
        let mask = (1usize << self.level) - 1;
        for (u, v) in self.values.values().iter().enumerate() {
            if u & mask != 0 && !v.is_zero() {
                return Err(AtomViolation::Support { cell: u, value: v.clone() });
            }
            if !within_atom_bound(v, self.level, self.p) {
                return Err(AtomViolation::SupBound { cell: u, value: v.clone() });
            }
        }
        let mean = self.values.integrate();
        if !mean.is_zero() {
            return Err(AtomViolation::NonzeroMean(mean));
        }
        Ok(())
    }

    /// `2^N`: Fejér means of this atom vanish for `n` up to this index.
    pub fn vanishing_order(&self) -> u64 {
        1 << self.level
    }
}

const AMPLITUDE_FRACTION_BITS: u32 = 20;

/// Largest multiple of `2^{-20}` not exceeding `2^{N/p}`.
pub fn atom_amplitude(level: u32, p: Exponent) -> Rational {
    let denom = BigInt::one() << AMPLITUDE_FRACTION_BITS as usize;
    let approx = libm::exp2(level as f64 / p.as_f64() + AMPLITUDE_FRACTION_BITS as f64);
    let mut k = BigInt::from_f64(libm::floor(approx)).unwrap_or_else(BigInt::zero);
    let fits = |k: &BigInt| within_atom_bound(&Rational::new(k.clone(), denom.clone()), level, p);
    while !fits(&k) {
        k -= 1;
    }
    while fits(&(&k + 1)) {
        k += 1;
    }
    Rational::new(k, denom)
}

/// Builds a `p`-atom on `I_N` at resolution `M >= N + 1`.
///
/// Seed 0 is the Haar-like atom `A (1_{I_{N+1}} - 1_{I_{N+1}(e_N)})` with
/// `A` = [`atom_amplitude`]. Other seeds draw integers on the cells of
/// `I_N`, subtract their mean, and rescale by a power of two so the values
/// stay dyadic and within the amplitude.
pub fn make_atom(level: u32, p: Exponent, resolution: Resolution, seed: u64) -> Result<AtomSpec> {
    if !p.below_one() {
        return Err(Error::param("p", alloc::format!("{p} is outside (0, 1)")));
    }
    if resolution.bits() <= level {
        return Err(Error::param(
            "resolution",
            alloc::format!("resolution {} cannot hold a nonconstant atom on I_{level}", resolution.bits()),
        ));
    }
    let amp = atom_amplitude(level, p);
    let mask = (1usize << level) - 1;
    let values = if seed == 0 {
        let e_n = unit(level);
        let high = (mask << 1) | 1;
        GridFn::from_fn(resolution, |u| {
            if u & high == 0 {
                amp.clone()
            } else if u & high == e_n {
                -amp.clone()
            } else {
                Rational::zero()
            }
        })?
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells = resolution.cells();
        let count = (cells >> level) as i64;
        let raw: Vec<i64> = (0..cells)
            .map(|u| if u & mask == 0 { rng.random_range(-1024i64..=1024) } else { 0 })
            .collect();
        let sum: i64 = raw.iter().sum();
        // count * (r - mean): integer, zero-sum over I_N
        let centred: Vec<i64> = raw
            .iter()
            .enumerate()
            .map(|(u, &r)| if u & mask == 0 { r * count - sum } else { 0 })
            .collect();
        let peak = centred.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        if peak == 0 {
            return make_atom(level, p, resolution, 0);
        }
        let exp = 64 - (peak - 1).leading_zeros();
        let scale = amp.clone() / Rational::from_integer(BigInt::one() << exp as usize);
        GridFn::from_fn(resolution, |u| Rational::from_integer(BigInt::from(centred[u])) * scale.clone())?
    };
    Ok(AtomSpec { level, p, values })
}

/// `f_m = D_{2^{2m+1}} - D_{2^{2m}}`, whose Kaczmarz coefficients are the
/// indicator of `[2^{2m}, 2^{2m+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleFn {
    pub m: u32,
    pub values: GridFn<i64>,
}

pub fn counterexample(m: u32, resolution: Resolution) -> Result<CounterexampleFn> {
    if m == 0 {
        return Err(Error::param("m", "the family starts at m = 1"));
    }
    resolution.check_coordinate_count(2 * m + 1)?;
    let hi = dirichlet_2pow(2 * m + 1, resolution)?;
    let lo = dirichlet_2pow(2 * m, resolution)?;
    Ok(CounterexampleFn {
        m,
        values: hi.sub_int(&lo)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{pow2, rational};
    use crate::group::PatternSet;
    use crate::kernels::dirichlet;
    use crate::systems::SystemId;
    use crate::transform::{conditional_expectation, fourier_coeffs, fwht, partial_sum};
    use proptest::prelude::*;

    fn res(m: u32) -> Resolution {
        Resolution::new(m).unwrap()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn lp_examples() {
        let c = GridFn::constant(res(4), -2.5f64).unwrap();
        for p in [0.25, 0.5, 1.0, 2.0] {
            assert!(rel_close(lp_quasinorm(&c, p).unwrap(), 2.5, 1e-14));
            assert!(rel_close(weak_lp(&c, p).unwrap(), 2.5, 1e-14));
        }
        for n in 0..=6u32 {
            let d = dirichlet_2pow(n, res(6)).unwrap().to_float();
            for p in [0.25, 1.0 / 3.0, 0.45] {
                let expected = libm::exp2(n as f64 * (1.0 - 1.0 / p));
                assert!(rel_close(lp_quasinorm(&d, p).unwrap(), expected, 1e-12));
            }
        }
        assert!(lp_quasinorm(&c, 0.0).is_err());
        assert!(weak_lp(&c, -1.0).is_err());
    }

    #[test]
    fn l2_norm_is_parseval() {
        let f = GridFn::from_fn(res(6), |u| rational((u as i64 * 17) % 11 - 5, 3)).unwrap();
        let l2 = lp_quasinorm(&f, 2.0).unwrap();
        assert!(rel_close(l2 * l2, fwht(&f).energy().to_f64(), 1e-13));
    }

    #[test]
    fn weak_single_level() {
        for n in 0..=5u32 {
            let ind: GridFn<Rational> = PatternSet::interval(res(5), n, 0).unwrap().indicator();
            let f = ind.scale(&rational(-3, 1));
            let expected = 3.0 * libm::exp2(-(n as f64) / 0.25);
            assert!(rel_close(weak_lp(&f, 0.25).unwrap(), expected, 1e-14));
            assert!(rel_close(lp_quasinorm(&f, 0.25).unwrap(), expected, 1e-12));
        }
        assert_eq!(weak_lp(&GridFn::<f64>::zero(res(3)).unwrap(), 0.5).unwrap(), 0.0);
    }

    #[test]
    fn martingale_maximal_examples() {
        let c = GridFn::constant(res(4), rational(-7, 3)).unwrap();
        assert!(martingale_maximal(&c).values().iter().all(|v| *v == rational(7, 3)));
        let f = GridFn::from_fn(res(5), |u| rational((u as i64 * 13) % 7 - 3, 2)).unwrap();
        let star = martingale_maximal(&f);
        let mean = f.integrate().abs();
        assert!(star.values().iter().all(|v| *v >= mean));
        // against the transform route
        let mut oracle = f.abs();
        for n in 0..=5 {
            let e = conditional_expectation(&f, n).unwrap().abs();
            oracle = oracle.zip_with(&e, |a, b| if a > b { a.clone() } else { b.clone() }).unwrap();
        }
        assert_eq!(star, oracle);
    }

    #[test]
    fn hardy_norm_examples() {
        let c = GridFn::constant(res(3), -1.5f64).unwrap();
        assert!(rel_close(hardy_norm(&c, 0.3).unwrap(), 1.5, 1e-14));
        let f1 = counterexample(1, res(3)).unwrap().values.to_exact();
        assert!(rel_close(hardy_norm(&f1, 0.25).unwrap(), libm::exp2(-6.0), 1e-12));
        // D_{2^n}^* is 2^j on I_j \ I_{j+1} (j < n) and 2^n on I_n, so its
        // Hardy norm is not its L_p norm.
        for n in 0..=8u32 {
            let d = dirichlet_2pow(n, res(8)).unwrap().to_exact();
            for p in [0.25, 1.0 / 3.0, 0.45] {
                let mut integral = libm::exp2(n as f64 * (p - 1.0));
                for j in 0..n {
                    integral += libm::exp2(j as f64 * p - (j + 1) as f64);
                }
                let expected = libm::pow(integral, 1.0 / p);
                assert!(rel_close(hardy_norm(&d, p).unwrap(), expected, 1e-12));
                let lp = lp_quasinorm(&d, p).unwrap();
                assert!(rel_close(lp, libm::exp2(n as f64 * (1.0 - 1.0 / p)), 1e-12));
            }
        }
    }

    #[test]
    fn counterexample_structure() {
        for m in 1..=3u32 {
            for extra in 0..2 {
                let r = res(2 * m + 1 + extra);
                let f = counterexample(m, r).unwrap().values;
                let lo = 1u64 << (2 * m);
                let c = fourier_coeffs(&f.to_exact(), SystemId::Kaczmarz);
                for (i, v) in c.coeffs().iter().enumerate() {
                    let inside = (lo..2 * lo).contains(&(i as u64));
                    assert_eq!(*v, rational(inside as i64, 1));
                }
                let mask = (1usize << (2 * m)) - 1;
                for u in 0..r.cells() {
                    let expected = if u & mask == 0 { 1i64 << (2 * m) } else { 0 };
                    assert_eq!(f.values()[u].abs(), expected);
                }
                let exact = f.to_exact();
                assert_eq!(martingale_maximal(&exact), exact.abs());
                for j in 0..=lo {
                    assert!(partial_sum(&exact, SystemId::Kaczmarz, j).unwrap().is_zero());
                }
            }
        }
        assert!(counterexample(2, res(4)).is_err());
    }

    #[test]
    fn partial_sum_case_split() {
        for m in 1..=3u32 {
            let r = res(2 * m + 1);
            let f = counterexample(m, r).unwrap().values.to_exact();
            let lo = 1u64 << (2 * m);
            let d_lo = dirichlet(SystemId::Kaczmarz, lo, r).unwrap().to_exact();
            for i in 0..=r.cells() as u64 {
                let s = partial_sum(&f, SystemId::Kaczmarz, i).unwrap();
                if i > lo && i < 2 * lo {
                    let d = dirichlet(SystemId::Kaczmarz, i, r).unwrap().to_exact();
                    assert_eq!(s, d.sub(&d_lo).unwrap());
                } else if i >= 2 * lo {
                    assert_eq!(s, f);
                } else {
                    assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn haar_atom() {
        let a = make_atom(1, Exponent::new(1, 2).unwrap(), res(3), 0).unwrap();
        assert_eq!(a.validate(), Ok(()));
        let support: Vec<_> = a.values.values().iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
        assert!(support.iter().all(|(u, v)| (*u & 1 == 0) && v.abs() == rational(4, 1)));
        assert_eq!(a.values.values()[0], rational(4, 1));
        assert_eq!(a.values.values()[2], rational(-4, 1));
        assert_eq!(a.values.integrate(), rational(0, 1));
        assert!(make_atom(3, Exponent::new(1, 4).unwrap(), res(3), 1).is_err());
        assert!(make_atom(1, Exponent::new(1, 1).unwrap(), res(3), 1).is_err());
    }

    #[test]
    fn amplitude_is_tight() {
        let quarter = Exponent::new(1, 4).unwrap();
        assert_eq!(atom_amplitude(5, quarter), pow2(20));
        let p = Exponent::new(2, 5).unwrap();
        let a = atom_amplitude(3, p);
        assert!(within_atom_bound(&a, 3, p));
        assert!(!within_atom_bound(&(a + pow2(-20)), 3, p));
    }

    #[test]
    fn atom_validation_detects_violations() {
        let p = Exponent::new(1, 4).unwrap();
        let a = make_atom(2, p, res(5), 3).unwrap();
        let mut bad = a.clone();
        bad.values = a.values.add(&GridFn::constant(res(5), rational(1, 1)).unwrap()).unwrap();
        assert!(bad.validate().is_err());
        let mut big = a.clone();
        big.values = a.values.scale(&rational(2, 1));
        assert!(matches!(big.validate(), Err(AtomViolation::SupBound { .. }) | Ok(())));
        let mut shifted = a.clone();
        shifted.values = a.values.translate(1);
        assert!(matches!(shifted.validate(), Err(AtomViolation::Support { .. })));
    }

    #[test]
    fn atoms_valid_for_many_seeds() {
        for (seed, p) in (0..1000u64).zip([Exponent::new(1, 4).unwrap(), Exponent::new(2, 5).unwrap(), Exponent::new(9, 20).unwrap()].iter().cycle()) {
            let level = (seed % 4) as u32;
            let a = make_atom(level, *p, res(level + 2), seed).unwrap();
            assert_eq!(a.validate(), Ok(()), "seed {seed}");
            assert_eq!(a.values.integrate(), rational(0, 1));
        }
        let a = make_atom(2, Exponent::new(1, 4).unwrap(), res(5), 7).unwrap();
        let b = make_atom(2, Exponent::new(1, 4).unwrap(), res(5), 7).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn weak_below_strong(vals in proptest::collection::vec(-100.0f64..100.0, 64), p in 0.1f64..3.0) {
            let f = GridFn::new(res(6), vals).unwrap();
            prop_assert!(weak_lp(&f, p).unwrap() <= lp_quasinorm(&f, p).unwrap() * (1.0 + 1e-12));
        }
    }
}
