//! Rademacher, Walsh-Paley and Walsh-Kaczmarz functions.
//!
//! Every function here is `+1` or `-1`. Kaczmarz functions are evaluated
//! through the Paley function of the block-reversed index, since
//! `kappa_n = w_{map(n)}` with `map` from [`kaczmarz_to_paley`].

use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::group::{bit_reverse, Resolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemId {
    Paley,
    Kaczmarz,
}

impl SystemId {
    pub fn as_str(&self) -> &'static str {
        match self {
            SystemId::Paley => "paley",
            SystemId::Kaczmarz => "kaczmarz",
        }
    }

    /// Position in the Paley ordering of this system's `n`-th function.
    #[inline]
    pub fn paley_index(&self, n: u64) -> u64 {
        match self {
            SystemId::Paley => n,
            SystemId::Kaczmarz => kaczmarz_to_paley(n),
        }
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paley" | "w" | "walsh" => Ok(SystemId::Paley),
            "kaczmarz" | "kappa" => Ok(SystemId::Kaczmarz),
            other => Err(Error::param("system", alloc::format!("unknown system `{other}`"))),
        }
    }
}

/// `(-1)^popcount(n & u)`, unchecked.
#[inline]
pub fn paley_sign(n: u64, u: usize) -> i64 {
    1 - 2 * ((n & u as u64).count_ones() as i64 & 1)
}

/// `r_k(u) = (-1)^{x_k}`.
pub fn rademacher(k: u32, u: usize, resolution: Resolution) -> Result<i64> {
    resolution.check_coordinate(k)?;
    resolution.check_index(u as u64)?;
    Ok(paley_sign(1 << k, u))
}

/// `w_n(u)`; requires `|n| < M`.
pub fn walsh_paley(n: u64, u: usize, resolution: Resolution) -> Result<i64> {
    resolution.check_index(n)?;
    resolution.check_index(u as u64)?;
    Ok(paley_sign(n, u))
}

/// `kappa_n(u)`; `kappa_0 = 1`, otherwise requires `|n| < M`.
pub fn kaczmarz(n: u64, u: usize, resolution: Resolution) -> Result<i64> {
    resolution.check_index(n)?;
    resolution.check_index(u as u64)?;
    Ok(paley_sign(kaczmarz_to_paley(n), u))
}

/// Evaluates `n`-th function of `system` at `u`.
pub fn evaluate(system: SystemId, n: u64, u: usize, resolution: Resolution) -> Result<i64> {
    match system {
        SystemId::Paley => walsh_paley(n, u, resolution),
        SystemId::Kaczmarz => kaczmarz(n, u, resolution),
    }
}

/// `|n|`, the position of the highest set bit.
pub fn msb(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::param("n", "|n| is undefined for n = 0"));
    }
    Ok(63 - n.leading_zeros())
}

#[inline]
fn msb_unchecked(n: u64) -> u32 {
    63 - n.leading_zeros()
}

/// Block bit reversal: `2^{|n|} + rev_{|n|}(n - 2^{|n|})`, with `0 -> 0`
/// and `1 -> 1`. An involution that maps each block `[2^A, 2^{A+1})` to
/// itself.
#[inline]
pub fn kaczmarz_to_paley(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let a = msb_unchecked(n);
    let lead = 1u64 << a;
    lead | bit_reverse(n - lead, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::tau;

    /// The product definition `r_{|n|} * prod_k r_{|n|-1-k}^{n_k}`.
    fn kaczmarz_literal(n: u64, u: usize) -> i64 {
        if n == 0 {
            return 1;
        }
        let a = msb_unchecked(n);
        let r = |k: u32| paley_sign(1 << k, u);
        let mut v = r(a);
        for k in 0..a {
            if n >> k & 1 == 1 {
                v *= r(a - 1 - k);
            }
        }
        v
    }

    fn res(m: u32) -> Resolution {
        Resolution::new(m).unwrap()
    }

    #[test]
    fn rademacher_examples() {
        let r = res(3);
        assert_eq!(rademacher(0, 0, r).unwrap(), 1);
        assert_eq!(rademacher(0, 1, r).unwrap(), -1);
        assert_eq!(rademacher(2, 0b100, r).unwrap(), -1);
        assert!(rademacher(3, 0, r).is_err());
    }

    #[test]
    fn paley_examples() {
        let r = res(4);
        for u in 0..16 {
            assert_eq!(walsh_paley(0, u, r).unwrap(), 1);
        }
        assert_eq!(walsh_paley(3, 0b11, r).unwrap(), 1);
        assert!(walsh_paley(16, 0, r).is_err());
        for n in 0..16 {
            for u in 0..16 {
                for v in 0..16 {
                    assert_eq!(paley_sign(n, u ^ v), paley_sign(n, u) * paley_sign(n, v));
                }
            }
        }
    }

    #[test]
    fn msb_examples() {
        assert_eq!(msb(1).unwrap(), 0);
        assert_eq!(msb(5).unwrap(), 2);
        for k in 0..40 {
            assert_eq!(msb(1 << k).unwrap(), k);
        }
        assert!(msb(0).is_err());
    }

    #[test]
    fn map_examples() {
        assert_eq!(kaczmarz_to_paley(0), 0);
        assert_eq!(kaczmarz_to_paley(1), 1);
        assert_eq!(kaczmarz_to_paley(2), 2);
        assert_eq!(kaczmarz_to_paley(3), 3);
        assert_eq!(kaczmarz_to_paley(5), 6);
        for n in 0..1 << 12 {
            assert_eq!(kaczmarz_to_paley(kaczmarz_to_paley(n)), n);
            if n > 0 {
                assert_eq!(msb_unchecked(kaczmarz_to_paley(n)), msb_unchecked(n));
            }
        }
    }

    #[test]
    fn kaczmarz_matches_product_definition() {
        let r = res(4);
        for u in 0..16 {
            assert_eq!(kaczmarz(0, u, r).unwrap(), 1);
            assert_eq!(kaczmarz(5, u, r).unwrap(), walsh_paley(6, u, r).unwrap());
        }
        for m in 0..=10u32 {
            let cells = 1usize << m;
            for n in 0..cells as u64 {
                assert_eq!(kaczmarz(n, 0, res(m)).unwrap(), 1);
                for u in 0..cells {
                    assert_eq!(kaczmarz_literal(n, u), paley_sign(kaczmarz_to_paley(n), u));
                }
            }
        }
    }

    #[test]
    fn tau_duality() {
        for a in 0..=6u32 {
            for n in 0..1u64 << a {
                for u in 0..1usize << 7 {
                    assert_eq!(paley_sign(n, tau(a, u)), paley_sign(bit_reverse(n, a), u));
                }
            }
        }
    }

    #[test]
    fn orthonormal_at_resolution() {
        for m in 0..=6u32 {
            let cells = 1usize << m;
            for system in [SystemId::Paley, SystemId::Kaczmarz] {
                for i in 0..cells as u64 {
                    for j in 0..cells as u64 {
                        let s: i64 = (0..cells)
                            .map(|u| {
                                evaluate(system, i, u, res(m)).unwrap() * evaluate(system, j, u, res(m)).unwrap()
                            })
                            .sum();
                        assert_eq!(s, if i == j { cells as i64 } else { 0 });
                    }
                }
            }
        }
    }

    #[test]
    fn skvortsov_relation_uses_block_tau() {
        // kappa_n(x) = r_{|n|}(x) w_{n - 2^{|n|}}(tau_{|n|}(x))
        for n in 1..256u64 {
            let a = msb_unchecked(n);
            for u in 0..512usize {
                let rhs = paley_sign(1 << a, u) * paley_sign(n - (1 << a), tau(a, u));
                assert_eq!(kaczmarz_literal(n, u), rhs);
            }
        }
    }
}
