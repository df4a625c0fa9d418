//! Dirichlet and Fejér kernels in both systems, the dyadic closed forms,
//! the four-term decomposition of `n K_n^kappa`, and the index sequence `q_A`.
//!
//! Kernels are integer-valued after scaling: `D_n` is a sum of characters and
//! `n K_n` a sum of Dirichlet kernels, so both are stored as `GridFn<i64>`
//! and all identities are checked with integer equality.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::{pow2, rational, GridFn, Rational};
use crate::group::{tau, Resolution};
use crate::systems::{msb, paley_sign, SystemId};
use crate::transform::synthesize_int;

/// Which Dirichlet kernels the Fejér average runs over.
///
/// `ZeroBased` is `K_n = (1/n) sum_{k=0}^{n-1} D_k` (with `D_0 = 0`);
/// `OneBased` is `K_n = (1/n) sum_{k=1}^{n} D_k`. They differ by `D_n / n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Convention {
    ZeroBased,
    OneBased,
}

impl Convention {
    pub const BOTH: [Convention; 2] = [Convention::ZeroBased, Convention::OneBased];

    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::ZeroBased => "zero-based",
            Convention::OneBased => "one-based",
        }
    }

    /// Weight of the `k`-th coefficient in `n K_n` (zero for `k >= n`).
    #[inline]
    pub fn multiplier(&self, n: u64, k: u64) -> i64 {
        if k >= n {
            return 0;
        }
        match self {
            Convention::ZeroBased => (n - 1 - k) as i64,
            Convention::OneBased => (n - k) as i64,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero-based" | "zero" | "0" => Ok(Convention::ZeroBased),
            "one-based" | "one" | "1" => Ok(Convention::OneBased),
            other => Err(Error::param("convention", alloc::format!("unknown convention `{other}`"))),
        }
    }
}

fn check_kernel_index(n: u64, resolution: Resolution) -> Result<()> {
    crate::grid::check_cap::<i64>(resolution)?;
    if n > resolution.cells() as u64 {
        return Err(Error::IndexOutOfRange {
            index: n,
            resolution: resolution.bits(),
        });
    }
    Ok(())
}

/// Integer grid `sum_{k < n} weight(k) alpha_k`.
fn synthesize_weighted(
    system: SystemId,
    n: u64,
    resolution: Resolution,
    weight: impl Fn(u64) -> i64,
) -> GridFn<i64> {
    let mut coeffs = vec![0i64; resolution.cells()];
    for k in 0..n {
        coeffs[system.paley_index(k) as usize] = weight(k);
    }
    synthesize_int(resolution, coeffs)
}

/// `D_n = sum_{k<n} alpha_k`, `D_0 = 0`.
pub fn dirichlet(system: SystemId, n: u64, resolution: Resolution) -> Result<GridFn<i64>> {
    check_kernel_index(n, resolution)?;
    Ok(synthesize_weighted(system, n, resolution, |_| 1))
}

/// `D_{2^n}`: `2^n` on `I_n` and `0` elsewhere (same for both systems).
pub fn dirichlet_2pow(n: u32, resolution: Resolution) -> Result<GridFn<i64>> {
    resolution.check_coordinate_count(n)?;
    let mask = (1usize << n) - 1;
    GridFn::from_fn(resolution, |u| if u & mask == 0 { 1i64 << n } else { 0 })
}

/// `D_n^kappa = D_{2^{|n|}} + r_{|n|} (D^w_{n - 2^{|n|}} o tau_{|n|})`,
/// returned as `(head, tail)`.
pub fn dirichlet_kaczmarz_split(n: u64, resolution: Resolution) -> Result<(GridFn<i64>, GridFn<i64>)> {
    check_kernel_index(n, resolution)?;
    let a = msb(n)?;
    let head = dirichlet_2pow(a, resolution)?;
    let rest = n - (1 << a);
    let tail = if rest == 0 {
        GridFn::from_parts(resolution, vec![0; resolution.cells()])
    } else {
        let d = dirichlet(SystemId::Paley, rest, resolution)?;
        GridFn::from_parts(
            resolution,
            (0..resolution.cells())
                .map(|u| paley_sign(1 << a, u) * d.values()[tau(a, u)])
                .collect(),
        )
    };
    Ok((head, tail))
}

/// A Fejér kernel stored as the integer grid `n K_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FejerKernel {
    system: SystemId,
    n: u64,
    convention: Convention,
    scaled: GridFn<i64>,
}

impl FejerKernel {
    pub fn system(&self) -> SystemId {
        self.system
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn resolution(&self) -> Resolution {
        self.scaled.resolution()
    }

    /// `n K_n` as integers.
    pub fn scaled(&self) -> &GridFn<i64> {
        &self.scaled
    }

    pub fn value(&self, cell: usize) -> Rational {
        rational(self.scaled.values()[cell], self.n)
    }

    pub fn to_exact(&self) -> GridFn<Rational> {
        let n = BigInt::from(self.n);
        self.scaled
            .map(|&v| Rational::new(BigInt::from(v), n.clone()))
    }

    pub fn to_float(&self) -> GridFn<f64> {
        let n = self.n as f64;
        self.scaled.map(|&v| v as f64 / n)
    }

    pub fn integrate(&self) -> Rational {
        self.scaled.integrate_exact() / Rational::from_integer(BigInt::from(self.n))
    }

    /// `||K_n||_1`, exact.
    pub fn l1_norm(&self) -> Rational {
        self.scaled.l1_exact() / Rational::from_integer(BigInt::from(self.n))
    }
}

pub fn fejer(system: SystemId, n: u64, resolution: Resolution, convention: Convention) -> Result<FejerKernel> {
    if n == 0 {
        return Err(Error::param("n", "the Fejér kernel needs n >= 1"));
    }
    check_kernel_index(n, resolution)?;
    let scaled = synthesize_weighted(system, n, resolution, |k| convention.multiplier(n, k));
    Ok(FejerKernel {
        system,
        n,
        convention,
        scaled,
    })
}

/// Value of `K_{2^A}^w` on `I_A`: `(2^A - 1)/2` zero-based, `(2^A + 1)/2` one-based.
pub fn center_constant(a: u32, convention: Convention) -> Rational {
    let p = 1i64 << a;
    match convention {
        Convention::ZeroBased => rational(p - 1, 2),
        Convention::OneBased => rational(p + 1, 2),
    }
}

/// The `I_A` value as it is commonly printed, `2^{A-1}/2`. It disagrees with
/// [`center_constant`] under both conventions except at `A = 1` zero-based.
pub fn printed_center_constant(a: u32) -> Rational {
    pow2(a as i32 - 2)
}

/// Piecewise closed form of `K_{2^A}^w(z)`.
///
/// For `z` in `I_t \ I_{t+1}` with `t < A` the value is `2^{t-1}` when
/// `z - z_t e_t` lies in `I_A` and `0` otherwise, for either convention.
/// On `I_A` it is [`center_constant`].
pub fn fejer_closed_2pow_paley(a: u32, z: usize, resolution: Resolution, convention: Convention) -> Result<Rational> {
    resolution.check_coordinate_count(a)?;
    resolution.check_index(z as u64)?;
    Ok(closed_2pow_value(a, z, convention))
}

pub(crate) fn closed_2pow_value(a: u32, z: usize, convention: Convention) -> Rational {
    let mask = (1usize << a) - 1;
    if z & mask == 0 {
        return center_constant(a, convention);
    }
    let t = z.trailing_zeros();
    if (z ^ (1 << t)) & mask == 0 {
        pow2(t as i32 - 1)
    } else {
        rational(0, 1)
    }
}

/// The four terms of `n K_n^kappa`:
///
/// `1 + sum_{i<|n|} 2^i D_{2^i} + sum_{i<|n|} 2^i r_i (K^w_{2^i} o tau_i)
///    + (n - 2^{|n|}) (D_{2^{|n|}} + r_{|n|} (K^w_{n-2^{|n|}} o tau_{|n|}))`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDecomposition {
    pub n: u64,
    pub convention: Convention,
    pub constant: GridFn<i64>,
    pub dyadic_sum: GridFn<i64>,
    pub rotated_sum: GridFn<i64>,
    pub tail: GridFn<i64>,
}

impl KernelDecomposition {
    pub fn resolution(&self) -> Resolution {
        self.constant.resolution()
    }

    pub fn total(&self) -> GridFn<i64> {
        let cells = self.resolution().cells();
        GridFn::from_parts(
            self.resolution(),
            (0..cells)
                .map(|u| {
                    self.constant.values()[u]
                        + self.dyadic_sum.values()[u]
                        + self.rotated_sum.values()[u]
                        + self.tail.values()[u]
                })
                .collect(),
        )
    }
}

/// Builds the decomposition with inner Paley kernels in `convention`.
/// Under [`Convention::OneBased`] the terms sum to `n K_n^kappa` exactly.
pub fn skvortsov_terms(n: u64, resolution: Resolution, convention: Convention) -> Result<KernelDecomposition> {
    if n == 0 {
        return Err(Error::param("n", "the decomposition needs n >= 1"));
    }
    check_kernel_index(n, resolution)?;
    let cells = resolution.cells();
    let a = msb(n)?;

    let constant = GridFn::from_parts(resolution, vec![1i64; cells]);

    let mut dyadic = vec![0i64; cells];
    let mut rotated = vec![0i64; cells];
    for i in 0..a {
        let d = dirichlet_2pow(i, resolution)?;
        let k = fejer(SystemId::Paley, 1 << i, resolution, convention)?;
        for u in 0..cells {
            dyadic[u] += (1i64 << i) * d.values()[u];
            rotated[u] += paley_sign(1 << i, u) * k.scaled().values()[tau(i, u)];
        }
    }

    let rest = n - (1 << a);
    let mut tail = vec![0i64; cells];
    if rest > 0 {
        let d = dirichlet_2pow(a, resolution)?;
        let k = fejer(SystemId::Paley, rest, resolution, convention)?;
        for u in 0..cells {
            tail[u] = rest as i64 * d.values()[u] + paley_sign(1 << a, u) * k.scaled().values()[tau(a, u)];
        }
    }

    Ok(KernelDecomposition {
        n,
        convention,
        constant,
        dyadic_sum: GridFn::from_parts(resolution, dyadic),
        rotated_sum: GridFn::from_parts(resolution, rotated),
        tail: GridFn::from_parts(resolution, tail),
    })
}

/// The weighted pieces `L_n^1, L_n^2, L_n^3` of `n K_n^kappa / (n+1)^{1/p-1}`.
pub fn weighted_components(
    n: u64,
    p: Exponent,
    resolution: Resolution,
    convention: Convention,
) -> Result<[GridFn<f64>; 3]> {
    p.require_below_half()?;
    let terms = skvortsov_terms(n, resolution, convention)?;
    let w = component_weight(n, p);
    let l1 = GridFn::from_parts(
        resolution,
        terms
            .constant
            .values()
            .iter()
            .zip(terms.dyadic_sum.values())
            .map(|(&c, &d)| (c + d) as f64 * w)
            .collect(),
    );
    let l2 = terms.rotated_sum.map(|&v| v as f64 * w);
    let l3 = terms.tail.map(|&v| v as f64 * w);
    Ok([l1, l2, l3])
}

/// `(n+1)^{-(1/p-1)}`.
pub fn component_weight(n: u64, p: Exponent) -> f64 {
    libm::pow((n + 1) as f64, -(1.0 / p.as_f64() - 1.0))
}

/// `q_A = 2^{2A} + 2^{2A-2} + ... + 2^2 + 1 = (4^{A+1} - 1)/3`.
pub fn q_seq(a: u32) -> u64 {
    ((1u64 << (2 * a + 2)) - 1) / 3
}

/// `||K_n o tau_i||_1`, exact. Precomposition requires `i < |n|`.
pub fn kernel_l1_norm_exact(
    system: SystemId,
    n: u64,
    resolution: Resolution,
    convention: Convention,
    precompose: Option<u32>,
) -> Result<Rational> {
    let k = fejer(system, n, resolution, convention)?;
    match precompose {
        None => Ok(k.l1_norm()),
        Some(i) => {
            if i >= msb(n)? {
                return Err(Error::param("tau", alloc::format!("need i < |n| = {}, got {i}", msb(n)?)));
            }
            let rotated = k.scaled().compose_tau(i)?;
            Ok(rotated.l1_exact() / Rational::from_integer(BigInt::from(n)))
        }
    }
}

pub fn kernel_l1_norm(
    system: SystemId,
    n: u64,
    resolution: Resolution,
    convention: Convention,
    precompose: Option<u32>,
) -> Result<f64> {
    use crate::grid::Scalar;
    kernel_l1_norm_exact(system, n, resolution, convention, precompose).map(|r| r.to_f64())
}

/// Dirichlet kernel by direct pointwise summation of the system functions.
/// `O(n 2^M)`; used to cross-check the transform route.
pub fn dirichlet_by_summation(system: SystemId, n: u64, resolution: Resolution) -> Result<GridFn<i64>> {
    check_kernel_index(n, resolution)?;
    let idx: Vec<u64> = (0..n).map(|k| system.paley_index(k)).collect();
    GridFn::from_fn(resolution, |u| idx.iter().map(|&j| paley_sign(j, u)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Scalar;
    use crate::group::unit;

    fn res(m: u32) -> Resolution {
        Resolution::new(m).unwrap()
    }

    /// `sum_{k in range} D_k` by direct summation, the Fejér oracle.
    fn fejer_oracle(system: SystemId, n: u64, m: u32, convention: Convention) -> Vec<i64> {
        let range = match convention {
            Convention::ZeroBased => 0..n,
            Convention::OneBased => 1..n + 1,
        };
        let mut acc = vec![0i64; 1 << m];
        for k in range {
            let d = dirichlet_by_summation(system, k, res(m)).unwrap();
            for (a, v) in acc.iter_mut().zip(d.values()) {
                *a += v;
            }
        }
        acc
    }

    #[test]
    fn dirichlet_examples() {
        for system in [SystemId::Paley, SystemId::Kaczmarz] {
            assert!(dirichlet(system, 0, res(3)).unwrap().values().iter().all(|&v| v == 0));
        }
        let d4 = dirichlet(SystemId::Paley, 4, res(3)).unwrap();
        assert_eq!(d4.values(), &[4, 0, 0, 0, 4, 0, 0, 0]);
        assert_eq!(dirichlet(SystemId::Paley, 3, res(2)).unwrap().values(), &[3, 1, 1, -1]);
        assert!(dirichlet(SystemId::Paley, 9, res(3)).is_err());
        assert_eq!(dirichlet(SystemId::Paley, 1, res(4)).unwrap().integrate_exact(), rational(1, 1));
    }

    #[test]
    fn dirichlet_routes_agree() {
        for m in 0..=8u32 {
            for n in 0..=(1u64 << m) {
                for system in [SystemId::Paley, SystemId::Kaczmarz] {
                    assert_eq!(
                        dirichlet(system, n, res(m)).unwrap(),
                        dirichlet_by_summation(system, n, res(m)).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn dyadic_closed_form() {
        for n in 0..=6 {
            let closed = dirichlet_2pow(n, res(7)).unwrap();
            for system in [SystemId::Paley, SystemId::Kaczmarz] {
                assert_eq!(dirichlet(system, 1 << n, res(7)).unwrap(), closed);
            }
        }
    }

    #[test]
    fn kaczmarz_split() {
        let (head, tail) = dirichlet_kaczmarz_split(8, res(4)).unwrap();
        assert_eq!(head, dirichlet_2pow(3, res(4)).unwrap());
        assert!(tail.values().iter().all(|&v| v == 0));

        let (head, tail) = dirichlet_kaczmarz_split(5, res(4)).unwrap();
        assert_eq!(head.add_int(&tail).unwrap(), dirichlet(SystemId::Kaczmarz, 5, res(4)).unwrap());

        // n = 3: head D_2, tail r_1 * (D_1 o tau_1) = r_1 since D_1 = w_0 = 1
        let (head, tail) = dirichlet_kaczmarz_split(3, res(3)).unwrap();
        assert_eq!(head, dirichlet_2pow(1, res(3)).unwrap());
        for u in 0..8 {
            assert_eq!(tail.values()[u], paley_sign(0b10, u));
        }

        for m in 1..=7u32 {
            for n in 1..=(1u64 << m) {
                let (h, t) = dirichlet_kaczmarz_split(n, res(m)).unwrap();
                assert_eq!(h.add_int(&t).unwrap(), dirichlet(SystemId::Kaczmarz, n, res(m)).unwrap());
            }
        }
    }

    #[test]
    fn fejer_examples() {
        let k2 = fejer(SystemId::Paley, 2, res(4), Convention::ZeroBased).unwrap();
        assert!((0..16).all(|u| k2.value(u) == rational(1, 2)));
        let k4 = fejer(SystemId::Paley, 4, res(3), Convention::ZeroBased).unwrap();
        assert_eq!(k4.value(0), rational(3, 2));
        let k4 = fejer(SystemId::Paley, 4, res(3), Convention::OneBased).unwrap();
        assert_eq!(k4.value(0), rational(5, 2));
        assert!(fejer(SystemId::Paley, 0, res(3), Convention::ZeroBased).is_err());
    }

    #[test]
    fn fejer_matches_oracle_and_conventions() {
        for m in 0..=6u32 {
            for n in 1..=(1u64 << m) {
                for system in [SystemId::Paley, SystemId::Kaczmarz] {
                    for conv in Convention::BOTH {
                        let k = fejer(system, n, res(m), conv).unwrap();
                        assert_eq!(k.scaled().values(), &fejer_oracle(system, n, m, conv)[..]);
                        let expected = match conv {
                            Convention::ZeroBased => rational(n as i64 - 1, n),
                            Convention::OneBased => rational(1, 1),
                        };
                        assert_eq!(k.integrate(), expected);
                    }
                    let z = fejer(system, n, res(m), Convention::ZeroBased).unwrap();
                    let o = fejer(system, n, res(m), Convention::OneBased).unwrap();
                    let d = dirichlet(system, n, res(m)).unwrap();
                    assert_eq!(o.scaled().sub_int(z.scaled()).unwrap(), d);
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let r = res(4);
        assert_eq!(fejer_closed_2pow_paley(2, unit(0), r, Convention::ZeroBased).unwrap(), rational(1, 2));
        assert_eq!(
            fejer_closed_2pow_paley(2, unit(0) | unit(1), r, Convention::ZeroBased).unwrap(),
            rational(0, 1)
        );
        assert_eq!(fejer_closed_2pow_paley(2, 0, r, Convention::ZeroBased).unwrap(), rational(3, 2));
        assert_eq!(fejer_closed_2pow_paley(2, 0, r, Convention::OneBased).unwrap(), rational(5, 2));
        assert_eq!(fejer_closed_2pow_paley(1, 0, r, Convention::ZeroBased).unwrap(), rational(1, 2));
        assert_eq!(printed_center_constant(1), rational(1, 2));
        assert!(fejer_closed_2pow_paley(5, 0, r, Convention::ZeroBased).is_err());
    }

    #[test]
    fn closed_form_matches_brute_force() {
        for m in 1..=9u32 {
            for a in 0..=m {
                for conv in Convention::BOTH {
                    let k = fejer(SystemId::Paley, 1 << a, res(m), conv).unwrap();
                    for z in 0..1usize << m {
                        assert_eq!(k.value(z), closed_2pow_value(a, z, conv), "A={a} M={m} z={z} {conv}");
                    }
                }
            }
        }
    }

    #[test]
    fn skvortsov_small_cases() {
        // n = 2: 1 + D_1 + r_0 K_1 = D_1 + D_2 = 2 + r_0
        let t = skvortsov_terms(2, res(3), Convention::OneBased).unwrap();
        let expected = fejer(SystemId::Kaczmarz, 2, res(3), Convention::OneBased).unwrap();
        assert_eq!(t.total(), *expected.scaled());
        for u in 0..8 {
            assert_eq!(t.total().values()[u], 2 + paley_sign(1, u));
        }
        // zero-based residual at n = 2 is the constant 1
        let z = skvortsov_terms(2, res(3), Convention::ZeroBased).unwrap();
        let k = fejer(SystemId::Kaczmarz, 2, res(3), Convention::ZeroBased).unwrap();
        assert!(z.total().sub_int(k.scaled()).unwrap().values().iter().all(|&v| v == 1));
        for a in 0..6 {
            let t = skvortsov_terms(1 << a, res(6), Convention::OneBased).unwrap();
            assert!(t.tail.values().iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn skvortsov_identity_one_based() {
        for m in 0..=7u32 {
            for n in 1..=(1u64 << m) {
                let t = skvortsov_terms(n, res(m), Convention::OneBased).unwrap();
                let k = fejer(SystemId::Kaczmarz, n, res(m), Convention::OneBased).unwrap();
                assert_eq!(t.total(), *k.scaled(), "n={n} M={m}");
            }
        }
    }

    #[test]
    fn weighted_components_sum() {
        let p = Exponent::new(1, 4).unwrap();
        let r = res(7);
        for n in 1..=128u64 {
            let [l1, l2, l3] = weighted_components(n, p, r, Convention::OneBased).unwrap();
            let k = fejer(SystemId::Kaczmarz, n, r, Convention::OneBased).unwrap();
            let w = component_weight(n, p);
            for u in 0..r.cells() {
                let target = k.scaled().values()[u] as f64 * w;
                let sum = l1.values()[u] + l2.values()[u] + l3.values()[u];
                assert!((sum - target).abs() <= 1e-12 * target.abs().max(1.0));
                assert!(target.abs() <= l1.values()[u].abs() + l2.values()[u].abs() + l3.values()[u].abs() + 1e-12);
            }
            if n.is_power_of_two() {
                assert!(l3.values().iter().all(|&v| v == 0.0));
            }
            // ||L_n^2||_1 <= 2 (n+1)^{-(1/p-2)}
            let l2_norm: f64 = l2.values().iter().map(|v| v.abs()).sum::<f64>() / r.cells() as f64;
            let bound = 2.0 * libm::pow((n + 1) as f64, -(1.0 / p.as_f64() - 2.0));
            assert!(l2_norm <= bound * (1.0 + 1e-12), "n={n}: {l2_norm} > {bound}");
        }
        assert!(weighted_components(3, Exponent::new(1, 2).unwrap(), r, Convention::OneBased).is_err());
    }

    #[test]
    fn q_sequence() {
        assert_eq!(q_seq(0), 1);
        assert_eq!(q_seq(1), 5);
        assert_eq!(q_seq(2), 21);
        for a in 1..20 {
            assert_eq!(q_seq(a) - 4 * q_seq(a - 1), 1);
            let expanded: u64 = (0..=a).map(|j| 1u64 << (2 * j)).sum();
            assert_eq!(q_seq(a), expanded);
        }
    }

    #[test]
    fn l1_norms() {
        let k2 = kernel_l1_norm(SystemId::Paley, 2, res(4), Convention::ZeroBased, None).unwrap();
        assert_eq!(k2, 0.5);
        for n in 2..=64u64 {
            let plain = kernel_l1_norm_exact(SystemId::Paley, n, res(7), Convention::ZeroBased, None).unwrap();
            for i in 0..msb(n).unwrap() {
                let rotated =
                    kernel_l1_norm_exact(SystemId::Paley, n, res(7), Convention::ZeroBased, Some(i)).unwrap();
                assert_eq!(rotated, plain);
            }
            assert!(plain.to_f64() <= 2.0);
        }
        assert!(kernel_l1_norm_exact(SystemId::Paley, 4, res(3), Convention::ZeroBased, Some(2)).is_err());
    }
}
