//! Fejér analysis on the dyadic (Walsh) group at finite resolution.
//!
//! The group `G = Z_2^N` is truncated to `2^M` cells. A cell `u` encodes the
//! point `x = (x_0, x_1, ...)` with coordinate `x_k` stored in bit `k`, so
//! group addition is XOR and the Walsh-Paley character `w_n` evaluates to
//! `(-1)^popcount(n & u)`.
//!
//! The crate is `no_std` and only needs `alloc`. Exact computations run on
//! [`Rational`] (arbitrary precision) or on integer grids; `f64` is used
//! wherever fractional powers appear.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod error;
pub mod exponent;
pub mod grid;
pub mod group;
pub mod kernels;
pub mod limits;
pub mod operators;
pub mod spaces;
pub mod systems;
pub mod transform;

pub use error::{Error, Result};
pub use exponent::Exponent;
pub use grid::{Backend, GridFn, GridValue, Rational, Scalar};
pub use group::{Coord, PatternSet, Resolution};
pub use kernels::{Convention, FejerKernel, KernelDecomposition};
pub use operators::WeightSpec;
pub use spaces::{AtomSpec, CounterexampleFn};
pub use systems::SystemId;
pub use transform::CoeffVector;
