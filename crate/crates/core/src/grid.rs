//! Cylinder functions on the dyadic group: one value per cell at resolution `M`.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{tau, Resolution};
use crate::limits;

/// Arbitrary-precision rational, the exact backend.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A type that can be stored in a [`GridFn`]. Integer grids count as exact.
pub trait GridValue: Clone + PartialEq {
    const BACKEND: Backend;
}

impl GridValue for f64 {
    const BACKEND: Backend = Backend::Float;
}

impl GridValue for i64 {
    const BACKEND: Backend = Backend::Exact;
}

impl GridValue for Rational {
    const BACKEND: Backend = Backend::Exact;
}

/// Field-valued grid entries: exact rationals or `f64`.
pub trait Scalar: GridValue + PartialOrd + fmt::Debug + Num + Signed {
    /// `num / den`; exact for [`Rational`], correctly rounded for `f64`.
    fn from_ratio(num: i64, den: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// `2^{-bits}` (the measure of one cell at resolution `bits`).
    fn cell_measure(bits: u32) -> Self {
        Self::from_ratio(1, 1u64 << bits)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational {
    fn from_ratio(num: i64, den: u64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

pub fn rational(num: i64, den: u64) -> Rational {
    Rational::from_ratio(num, den)
}

/// `2^exp` as an exact rational; `exp` may be negative.
pub fn pow2(exp: i32) -> Rational {
    let p = BigInt::one() << exp.unsigned_abs();
    if exp >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFn<T> {
    resolution: Resolution,
    values: Vec<T>,
}

impl<T: GridValue> GridFn<T> {
    pub fn new(resolution: Resolution, values: Vec<T>) -> Result<Self> {
        check_cap::<T>(resolution)?;
        if values.len() != resolution.cells() {
            return Err(Error::LengthMismatch {
                expected: resolution.cells(),
                found: values.len(),
            });
        }
        Ok(GridFn { resolution, values })
    }

    pub fn from_fn(resolution: Resolution, f: impl FnMut(usize) -> T) -> Result<Self> {
        check_cap::<T>(resolution)?;
        Ok(GridFn {
            resolution,
            values: (0..resolution.cells()).map(f).collect(),
        })
    }

    pub fn constant(resolution: Resolution, value: T) -> Result<Self> {
        Self::from_fn(resolution, |_| value.clone())
    }

    /// Internal constructor for results derived from an already validated grid.
    pub(crate) fn from_parts(resolution: Resolution, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), resolution.cells());
        GridFn { resolution, values }
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn backend(&self) -> Backend {
        T::BACKEND
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn get(&self, cell: usize) -> &T {
        &self.values[cell]
    }

    pub fn map<U: GridValue>(&self, f: impl FnMut(&T) -> U) -> GridFn<U> {
        GridFn::from_parts(self.resolution, self.values.iter().map(f).collect())
    }

    /// `x -> f(tau_A(x))`.
    pub fn compose_tau(&self, a: u32) -> Result<Self> {
        self.resolution.check_coordinate_count(a)?;
        Ok(GridFn::from_parts(
            self.resolution,
            (0..self.resolution.cells())
                .map(|u| self.values[tau(a, u)].clone())
                .collect(),
        ))
    }

    /// `x -> f(x + t)`.
    pub fn translate(&self, t: usize) -> Self {
        GridFn::from_parts(
            self.resolution,
            (0..self.resolution.cells())
                .map(|u| self.values[u ^ t].clone())
                .collect(),
        )
    }

    /// Cylinder extension to a finer resolution: each value is replicated
    /// over the `2^{target - M}` refined cells that share its low `M` bits.
    pub fn lift(&self, target: Resolution) -> Result<Self> {
        if target.bits() < self.resolution.bits() {
            return Err(Error::CannotCoarsen {
                from: self.resolution.bits(),
                to: target.bits(),
            });
        }
        let mask = self.resolution.cells() - 1;
        Self::from_fn(target, |u| self.values[u & mask].clone())
    }

    pub(crate) fn check_same_resolution(&self, other: &GridFn<T>) -> Result<()> {
        if self.resolution != other.resolution {
            return Err(Error::ResolutionMismatch {
                left: self.resolution.bits(),
                right: other.resolution.bits(),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_cap<T: GridValue>(resolution: Resolution) -> Result<()> {
    let cap = limits::cap(T::BACKEND);
    if resolution.bits() > cap {
        return Err(Error::ResolutionCap {
            requested: resolution.bits(),
            cap,
            backend: T::BACKEND,
        });
    }
    Ok(())
}

impl<T: Scalar> GridFn<T> {
    pub fn zero(resolution: Resolution) -> Result<Self> {
        Self::constant(resolution, T::zero())
    }

    /// `2^{-M} * sum of values`, exact for the rational backend.
    pub fn integrate(&self) -> T {
        let sum = self
            .values
            .iter()
            .fold(T::zero(), |acc, v| acc + v.clone());
        sum * T::cell_measure(self.resolution.bits())
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|v| v.clone() * c.clone())
    }

    pub fn add(&self, other: &GridFn<T>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &GridFn<T>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn mul(&self, other: &GridFn<T>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() * b.clone())
    }

    pub fn zip_with(&self, other: &GridFn<T>, mut f: impl FnMut(&T, &T) -> T) -> Result<Self> {
        self.check_same_resolution(other)?;
        Ok(GridFn::from_parts(
            self.resolution,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        ))
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| {
            let a = v.abs();
            if a > m {
                a
            } else {
                m
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn to_float(&self) -> GridFn<f64> {
        self.map(Scalar::to_f64)
    }
}

impl GridFn<f64> {
    /// Float grids compare only under an explicit absolute tolerance.
    pub fn approx_eq(&self, other: &GridFn<f64>, tol: f64) -> bool {
        self.resolution == other.resolution
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

impl GridFn<i64> {
    pub fn to_exact(&self) -> GridFn<Rational> {
        self.map(|&v| Rational::from_integer(BigInt::from(v)))
    }

    pub fn to_float(&self) -> GridFn<f64> {
        self.map(|&v| v as f64)
    }

    pub fn sum(&self) -> i128 {
        self.values.iter().map(|&v| v as i128).sum()
    }

    pub fn integrate_exact(&self) -> Rational {
        Rational::new(
            BigInt::from(self.sum()),
            BigInt::one() << self.resolution.bits(),
        )
    }

    /// `integrate(|f|)`, exact.
    pub fn l1_exact(&self) -> Rational {
        let s: i128 = self.values.iter().map(|&v| (v as i128).abs()).sum();
        Rational::new(BigInt::from(s), BigInt::one() << self.resolution.bits())
    }

    pub fn add_int(&self, other: &GridFn<i64>) -> Result<Self> {
        self.check_same_resolution(other)?;
        Ok(GridFn::from_parts(
            self.resolution,
            self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub_int(&self, other: &GridFn<i64>) -> Result<Self> {
        self.check_same_resolution(other)?;
        Ok(GridFn::from_parts(
            self.resolution,
            self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.map(|&v| v * c)
    }
}
