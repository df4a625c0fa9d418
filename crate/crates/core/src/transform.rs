//! Fast Walsh-Hadamard transform, Fourier coefficients in both orderings,
//! partial sums and dyadic convolution.

use alloc::vec::Vec;
use core::mem;
use core::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::grid::{GridFn, Scalar};
use crate::group::Resolution;
use crate::systems::{kaczmarz_to_paley, SystemId};

/// Fourier coefficients at resolution `M`; entry `n` is `f^(n)` in `ordering`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector<T> {
    resolution: Resolution,
    ordering: SystemId,
    coeffs: Vec<T>,
}

impl<T: Scalar> CoeffVector<T> {
    pub fn new(resolution: Resolution, ordering: SystemId, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != resolution.cells() {
            return Err(Error::LengthMismatch {
                expected: resolution.cells(),
                found: coeffs.len(),
            });
        }
        Ok(CoeffVector {
            resolution,
            ordering,
            coeffs,
        })
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn ordering(&self) -> SystemId {
        self.ordering
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Same coefficients listed in another ordering. Both orderings index the
    /// same characters; `kaczmarz_to_paley` is an involution so one
    /// permutation serves both directions.
    pub fn reorder(&self, ordering: SystemId) -> Self {
        if ordering == self.ordering {
            return self.clone();
        }
        let coeffs = (0..self.coeffs.len() as u64)
            .map(|n| self.coeffs[kaczmarz_to_paley(n) as usize].clone())
            .collect();
        CoeffVector {
            resolution: self.resolution,
            ordering,
            coeffs,
        }
    }

    /// `sum_n coeffs(n)^2`.
    pub fn energy(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |acc, c| acc + c.clone() * c.clone())
    }
}

/// Unnormalized in-place Walsh-Hadamard butterfly in Paley order.
/// Applying it twice multiplies by `data.len()`.
pub fn butterfly<T>(data: &mut [T])
where
    T: Clone + Add<Output = T> + Sub<Output = T>,
{
    let n = data.len();
    assert!(n.is_power_of_two(), "butterfly length must be a power of two");
    let mut half = 1;
    while half < n {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let sum = a.clone() + b.clone();
                let diff = mem::replace(a, sum) - b.clone();
                *b = diff;
            }
        }
        half <<= 1;
    }
}

/// Paley coefficients `2^{-M} sum_u f(u) w_n(u)`.
pub fn fwht<T: Scalar>(f: &GridFn<T>) -> CoeffVector<T> {
    let mut data = f.values().to_vec();
    butterfly(&mut data);
    let scale = T::cell_measure(f.resolution().bits());
    for v in &mut data {
        *v = v.clone() * scale.clone();
    }
    CoeffVector {
        resolution: f.resolution(),
        ordering: SystemId::Paley,
        coeffs: data,
    }
}

/// `sum_n c(n) alpha_n(u)`: the function with the given coefficients.
pub fn inverse<T: Scalar>(c: &CoeffVector<T>) -> GridFn<T> {
    let mut data = c.reorder(SystemId::Paley).coeffs;
    butterfly(&mut data);
    GridFn::from_parts(c.resolution, data)
}

pub fn fourier_coeffs<T: Scalar>(f: &GridFn<T>, system: SystemId) -> CoeffVector<T> {
    fwht(f).reorder(system)
}

/// `sum_{i < terms} f^(i) alpha_i`.
pub fn partial_sum<T: Scalar>(f: &GridFn<T>, system: SystemId, terms: u64) -> Result<GridFn<T>> {
    let res = f.resolution();
    if terms > res.cells() as u64 {
        return Err(Error::IndexOutOfRange {
            index: terms,
            resolution: res.bits(),
        });
    }
    let mut c = fourier_coeffs(f, system);
    for v in &mut c.coeffs[terms as usize..] {
        *v = T::zero();
    }
    Ok(inverse(&c))
}

/// `S_{2^n} f`, the conditional expectation on the level-`n` dyadic cells.
pub fn conditional_expectation<T: Scalar>(f: &GridFn<T>, n: u32) -> Result<GridFn<T>> {
    f.resolution().check_coordinate_count(n)?;
    partial_sum(f, SystemId::Paley, 1 << n)
}

/// `(f * g)(x) = integral f(t) g(x + t) dt`, via the Paley coefficient product.
pub fn convolve<T: Scalar>(f: &GridFn<T>, g: &GridFn<T>) -> Result<GridFn<T>> {
    if f.resolution() != g.resolution() {
        return Err(Error::ResolutionMismatch {
            left: f.resolution().bits(),
            right: g.resolution().bits(),
        });
    }
    let a = fwht(f);
    let b = fwht(g);
    let coeffs = a
        .coeffs
        .into_iter()
        .zip(b.coeffs)
        .map(|(x, y)| x * y)
        .collect();
    Ok(inverse(&CoeffVector {
        resolution: f.resolution(),
        ordering: SystemId::Paley,
        coeffs,
    }))
}

/// Integer synthesis `u -> sum_k c[k] w_k(u)` for Paley-ordered integer
/// coefficients. Exact as long as the partial sums fit in `i64`.
pub fn synthesize_int(resolution: Resolution, mut coeffs: Vec<i64>) -> GridFn<i64> {
    assert_eq!(coeffs.len(), resolution.cells());
    butterfly(&mut coeffs);
    GridFn::from_parts(resolution, coeffs)
}
