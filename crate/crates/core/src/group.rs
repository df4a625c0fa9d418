//! The dyadic group truncated to `M` coordinates, the coordinate reversal
//! `tau_A`, and dyadic cell patterns.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::grid::{GridFn, GridValue, Rational};
use crate::limits::ABSOLUTE_MAX_RESOLUTION;

/// Number of materialized coordinates; the group has `2^M` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Resolution(u32);

impl Resolution {
    pub fn new(bits: u32) -> Result<Self> {
        if bits > ABSOLUTE_MAX_RESOLUTION {
            return Err(Error::param(
                "resolution",
                alloc::format!("{bits} exceeds the absolute maximum {ABSOLUTE_MAX_RESOLUTION}"),
            ));
        }
        Ok(Resolution(bits))
    }

    pub fn bits(&self) -> u32 {
        self.0
    }

    pub fn cells(&self) -> usize {
        1usize << self.0
    }

    /// Errors unless `index < 2^M`, i.e. `|index| < M`.
    pub fn check_index(&self, index: u64) -> Result<()> {
        if index >> self.0 != 0 {
            return Err(Error::IndexOutOfRange {
                index,
                resolution: self.0,
            });
        }
        Ok(())
    }

    /// Errors unless `count <= M` (valid argument for `tau_A`, `I_n`).
    pub fn check_coordinate_count(&self, count: u32) -> Result<()> {
        if count > self.0 {
            return Err(Error::CoordinateOutOfRange {
                coord: count,
                resolution: self.0,
            });
        }
        Ok(())
    }

    /// Errors unless `coord < M`.
    pub fn check_coordinate(&self, coord: u32) -> Result<()> {
        if coord >= self.0 {
            return Err(Error::CoordinateOutOfRange {
                coord,
                resolution: self.0,
            });
        }
        Ok(())
    }
}

/// Reverses the low `bits` bits of `v`.
#[inline]
pub fn bit_reverse(v: u64, bits: u32) -> u64 {
    if bits == 0 {
        0
    } else {
        v.reverse_bits() >> (64 - bits)
    }
}

/// `tau_A`: reverse coordinates `x_0..x_{A-1}`, keep the rest.
#[inline]
pub fn tau(a: u32, u: usize) -> usize {
    let low_mask = (1usize << a) - 1;
    (u & !low_mask) | bit_reverse((u & low_mask) as u64, a) as usize
}

/// Checked `tau_A` at resolution `M`.
pub fn tau_checked(a: u32, u: usize, resolution: Resolution) -> Result<usize> {
    resolution.check_coordinate_count(a)?;
    resolution.check_index(u as u64)?;
    Ok(tau(a, u))
}

/// `e_k`: the cell whose only nonzero coordinate is `x_k`.
pub fn unit(k: u32) -> usize {
    1usize << k
}

/// Constraint on a single coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coord {
    Zero,
    One,
    Free,
}

/// A dyadic cell pattern: each coordinate is fixed to 0, fixed to 1, or free.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternSet {
    resolution: Resolution,
    coords: Vec<Coord>,
}

impl PatternSet {
    /// The whole group.
    pub fn full(resolution: Resolution) -> Self {
        PatternSet {
            resolution,
            coords: vec![Coord::Free; resolution.bits() as usize],
        }
    }

    pub fn from_coords(resolution: Resolution, coords: Vec<Coord>) -> Result<Self> {
        if coords.len() != resolution.bits() as usize {
            return Err(Error::LengthMismatch {
                expected: resolution.bits() as usize,
                found: coords.len(),
            });
        }
        Ok(PatternSet { resolution, coords })
    }

    /// `I_n(x)`: the first `n` coordinates agree with those of `x`.
    pub fn interval(resolution: Resolution, n: u32, x: usize) -> Result<Self> {
        resolution.check_coordinate_count(n)?;
        let mut s = Self::full(resolution);
        for k in 0..n {
            s.coords[k as usize] = if x >> k & 1 == 1 { Coord::One } else { Coord::Zero };
        }
        Ok(s)
    }

    /// `J_t^l`, the pieces of `I_t \ I_{t+1}` split by the next set coordinate
    /// below `n`: zeros below `t`, `x_t = 1`, zeros up to `l`, `x_l = 1`, free
    /// above. For `l = n` this is `I_n(e_t)`.
    pub fn shell_part(resolution: Resolution, n: u32, t: u32, l: u32) -> Result<Self> {
        resolution.check_coordinate_count(n)?;
        if !(t < l && l <= n) {
            return Err(Error::param("l", alloc::format!("need t < l <= n, got t={t}, l={l}, n={n}")));
        }
        if l == n {
            return Self::interval(resolution, n, unit(t));
        }
        let mut s = Self::interval(resolution, l + 1, unit(t) | unit(l))?;
        for k in l + 1..n {
            s.coords[k as usize] = Coord::Free;
        }
        Ok(s)
    }

    /// `J_N^{m,l}`: level-`n` cells outside `I_n` whose highest set coordinate
    /// below `n` is `l` and whose next lower set coordinate is `m` (`None`
    /// when `x_l` is the only set one). Coordinates below `m` are free.
    pub fn top_bits_class(resolution: Resolution, n: u32, m: Option<u32>, l: u32) -> Result<Self> {
        resolution.check_coordinate_count(n)?;
        if l >= n || m.is_some_and(|m| m >= l) {
            return Err(Error::param("m", alloc::format!("need m < l < n, got m={m:?}, l={l}, n={n}")));
        }
        let mut s = Self::full(resolution);
        for k in 0..n {
            s.coords[k as usize] = Coord::Zero;
        }
        s.coords[l as usize] = Coord::One;
        if let Some(m) = m {
            s.coords[m as usize] = Coord::One;
            for k in 0..m {
                s.coords[k as usize] = Coord::Free;
            }
        }
        Ok(s)
    }

    /// The cells `I_{2A}(0,..,0, x_{2m}=1, 0,..,0, x_{2s}=1, x_{2s+1},..,x_{2A-1})`
    /// on which the `q_{A-1}` Fejér kernel is bounded below.
    pub fn two_spike(resolution: Resolution, a: u32, m: u32, s: u32) -> Result<Self> {
        resolution.check_coordinate_count(2 * a)?;
        if !(m + 2 <= s && s < a) {
            return Err(Error::param("s", alloc::format!("need m+2 <= s < A, got m={m}, s={s}, A={a}")));
        }
        let mut p = Self::interval(resolution, 2 * s + 1, unit(2 * m) | unit(2 * s))?;
        for k in 2 * s + 1..2 * a {
            p.coords[k as usize] = Coord::Free;
        }
        Ok(p)
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn fixed_count(&self) -> u32 {
        self.coords.iter().filter(|c| **c != Coord::Free).count() as u32
    }

    /// `2^{-#fixed}`, exact.
    pub fn measure(&self) -> Rational {
        Rational::new(BigInt::one(), BigInt::one() << self.fixed_count())
    }

    pub fn contains(&self, u: usize) -> bool {
        self.coords.iter().enumerate().all(|(k, c)| match c {
            Coord::Zero => u >> k & 1 == 0,
            Coord::One => u >> k & 1 == 1,
            Coord::Free => true,
        })
    }

    /// Enumerates the `2^{#free}` matching cells in increasing order.
    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        let free: Vec<u32> = (0..self.coords.len() as u32)
            .filter(|&k| self.coords[k as usize] == Coord::Free)
            .collect();
        let base: usize = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == Coord::One)
            .map(|(k, _)| 1usize << k)
            .sum();
        (0..1usize << free.len()).map(move |i| {
            free.iter()
                .enumerate()
                .filter(|(j, _)| i >> j & 1 == 1)
                .fold(base, |acc, (_, &k)| acc | 1usize << k)
        })
    }

    /// `{tau_A(x) : x in self}`.
    pub fn tau_image(&self, a: u32) -> Result<Self> {
        self.resolution.check_coordinate_count(a)?;
        let mut coords = self.coords.clone();
        for j in 0..a as usize {
            coords[j] = self.coords[a as usize - 1 - j];
        }
        Ok(PatternSet {
            resolution: self.resolution,
            coords,
        })
    }

    pub fn indicator<T: GridValue + num_traits::Zero + num_traits::One>(&self) -> GridFn<T> {
        GridFn::from_parts(
            self.resolution,
            (0..self.resolution.cells())
                .map(|u| if self.contains(u) { T::one() } else { T::zero() })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::pow2;
    use alloc::collections::BTreeSet;

    fn res(m: u32) -> Resolution {
        Resolution::new(m).unwrap()
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(2, 0b01), 0b10);
        for a in 0..=6 {
            assert_eq!(tau(a, 0), 0);
        }
        for u in 0..64 {
            assert_eq!(tau(3, tau(3, u)), u);
            assert_eq!(tau(3, u) >> 3, u >> 3);
        }
        assert_eq!(tau(3, 0b1_001), 0b1_100);
        assert!(tau_checked(4, 0, res(3)).is_err());
        assert_eq!(tau_checked(3, 0b001, res(3)).unwrap(), 0b100);
    }

    #[test]
    fn xor_group_laws_exhaustive() {
        for m in 0..=4u32 {
            let n = 1usize << m;
            for a in 0..n {
                assert_eq!(a ^ 0, a);
                assert_eq!(a ^ a, 0);
                for b in 0..n {
                    assert_eq!(a ^ b, b ^ a);
                    for c in 0..n {
                        assert_eq!((a ^ b) ^ c, a ^ (b ^ c));
                    }
                }
            }
        }
    }

    #[test]
    fn interval_measure() {
        for n in 0..=7 {
            let s = PatternSet::interval(res(7), n, 0).unwrap();
            assert_eq!(s.measure(), pow2(-(n as i32)));
            assert_eq!(s.cells().count(), 1 << (7 - n));
        }
        assert!(PatternSet::interval(res(3), 4, 0).is_err());
    }

    #[test]
    fn shell_parts_count() {
        let n = 6;
        let r = res(n);
        for t in 0..n {
            for l in t + 1..n {
                let j = PatternSet::shell_part(r, n, t, l).unwrap();
                assert_eq!(j.cells().count(), 1 << (n - l - 1));
                assert_eq!(j.measure(), pow2(-(l as i32 + 1)));
            }
        }
    }

    #[test]
    fn shell_parts_partition_annulus() {
        for n in 1..=8u32 {
            let r = res(n);
            for t in 0..n {
                let mut seen = BTreeSet::new();
                let inner = PatternSet::interval(r, t + 1, 0).unwrap();
                for u in inner.cells() {
                    assert!(seen.insert(u));
                }
                for l in t + 1..=n {
                    for u in PatternSet::shell_part(r, n, t, l).unwrap().cells() {
                        assert!(seen.insert(u), "overlap at t={t} l={l} u={u}");
                    }
                }
                let outer: BTreeSet<usize> = PatternSet::interval(r, t, 0).unwrap().cells().collect();
                assert_eq!(seen, outer);
            }
        }
    }

    #[test]
    fn top_bits_classes_partition_complement() {
        for n in 1..=7u32 {
            let r = res(n + 1);
            let mut seen = BTreeSet::new();
            for l in 0..n {
                for m in core::iter::once(None).chain((0..l).map(Some)) {
                    for u in PatternSet::top_bits_class(r, n, m, l).unwrap().cells() {
                        assert!(seen.insert(u));
                    }
                }
            }
            let complement: BTreeSet<usize> = (0..r.cells()).filter(|u| u & ((1 << n) - 1) != 0).collect();
            assert_eq!(seen, complement);
        }
    }

    #[test]
    fn tau_image_preserves_measure() {
        let r = res(6);
        let s = PatternSet::from_coords(
            r,
            vec![Coord::One, Coord::Free, Coord::Zero, Coord::Free, Coord::One, Coord::Free],
        )
        .unwrap();
        for a in 0..=6 {
            let img = s.tau_image(a).unwrap();
            assert_eq!(img.measure(), s.measure());
            let direct: BTreeSet<usize> = s.cells().map(|u| tau(a, u)).collect();
            let via: BTreeSet<usize> = img.cells().collect();
            assert_eq!(direct, via);
        }
    }

    #[test]
    fn two_spike_shape() {
        let p = PatternSet::two_spike(res(6), 3, 0, 2).unwrap();
        let cells: Vec<usize> = p.cells().collect();
        assert_eq!(cells, vec![0b010001, 0b110001]);
        assert!(PatternSet::two_spike(res(6), 3, 0, 1).is_err());
    }
}
