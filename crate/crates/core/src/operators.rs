//! Fejér means, weight functions and truncated weighted maximal operators.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::{GridFn, Scalar};
use crate::kernels::Convention;
use crate::systems::{paley_sign, SystemId};
use crate::transform::{fourier_coeffs, fwht, inverse, CoeffVector};

/// Denominator `phi(n)` of a weighted maximal operator.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// `1`
    Unit,
    /// `log_2^2(n + 1)`
    Log2Sq,
    /// `(n + 1)^{1/p - 2}`, for `0 < p < 1/2`
    Power(Exponent),
    /// `phi(n) = table[n - 1]`; nondecreasing and `>= 1`.
    Table(Vec<f64>),
}

impl WeightSpec {
    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("weight", "empty weight table"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 1.0)) {
            return Err(Error::param("weight", "table entries must be finite and >= 1"));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("weight", "table must be nondecreasing"));
        }
        Ok(WeightSpec::Table(values))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::Power(p) => p.require_below_half(),
            WeightSpec::Table(v) => Self::table(v.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn weight(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::param("n", "weights are defined for n >= 1"));
        }
        match self {
            WeightSpec::Unit => Ok(1.0),
            WeightSpec::Log2Sq => {
                let l = libm::log2((n + 1) as f64);
                Ok(l * l)
            }
            WeightSpec::Power(p) => {
                p.require_below_half()?;
                Ok(libm::pow((n + 1) as f64, p.power_weight_exponent()))
            }
            WeightSpec::Table(v) => v.get(n as usize - 1).copied().ok_or_else(|| {
                Error::param("weight", alloc::format!("table has {} entries, n = {n}", v.len()))
            }),
        }
    }
}

fn check_mean_index(n: u64, cells: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n", "Fejér means need n >= 1"));
    }
    if n > cells as u64 {
        return Err(Error::param("n", alloc::format!("n = {n} exceeds 2^M = {cells}")));
    }
    Ok(())
}

/// Coefficients of `sigma_n f` in the ordering of `system`.
pub fn fejer_mean_coeffs<T: Scalar>(
    f: &GridFn<T>,
    system: SystemId,
    n: u64,
    convention: Convention,
) -> Result<CoeffVector<T>> {
    apply_fejer_multipliers(&fourier_coeffs(f, system), n, convention)
}

/// Multiplies precomputed coefficients by the Fejér weights of order `n`.
pub fn apply_fejer_multipliers<T: Scalar>(
    c: &CoeffVector<T>,
    n: u64,
    convention: Convention,
) -> Result<CoeffVector<T>> {
    check_mean_index(n, c.resolution().cells())?;
    let coeffs = c
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let m = convention.multiplier(n, k as u64);
            if m == 0 {
                T::zero()
            } else {
                v.clone() * T::from_ratio(m, n)
            }
        })
        .collect();
    CoeffVector::new(c.resolution(), c.ordering(), coeffs)
}

/// `sigma_n f = f * K_n`, by coefficient multipliers: `f^(k) (n-1-k)/n`
/// zero-based, `f^(k) (n-k)/n` one-based, for `k < n`.
pub fn fejer_mean<T: Scalar>(f: &GridFn<T>, system: SystemId, n: u64, convention: Convention) -> Result<GridFn<T>> {
    Ok(inverse(&fejer_mean_coeffs(f, system, n, convention)?))
}

/// Running pointwise maximum of `|sigma_n f| / weight(n)` over `1 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalResult {
    pub values: GridFn<f64>,
    /// Smallest `n` attaining the maximum at each cell (0 where `f` gives 0 throughout).
    pub argmax: Vec<u64>,
}

/// `sup_{1 <= n <= n_max} |sigma_n f| / weight(n)`, pointwise, in `f64`.
pub fn maximal_fejer<T: Scalar>(
    f: &GridFn<T>,
    system: SystemId,
    n_max: u64,
    weight: &WeightSpec,
    convention: Convention,
) -> Result<GridFn<f64>> {
    Ok(maximal_fejer_with_argmax(f, system, n_max, weight, convention)?.values)
}

/// Streams the partial sums `S_j f` and their running total, so memory
/// stays at `O(2^M)` and each `n` costs `O(2^M)`.
pub fn maximal_fejer_with_argmax<T: Scalar>(
    f: &GridFn<T>,
    system: SystemId,
    n_max: u64,
    weight: &WeightSpec,
    convention: Convention,
) -> Result<MaximalResult> {
    let res = f.resolution();
    let cells = res.cells();
    check_mean_index(n_max, cells)?;
    weight.validate()?;
    let paley = fwht(&f.to_float());
    let coeffs = paley.coeffs();

    let mut partial = vec![0.0f64; cells];
    let mut running = vec![0.0f64; cells];
    let mut best = vec![0.0f64; cells];
    let mut argmax = vec![0u64; cells];

    let add_term = |partial: &mut [f64], j: u64| {
        let idx = system.paley_index(j);
        let c = coeffs[idx as usize];
        if c != 0.0 {
            for (u, s) in partial.iter_mut().enumerate() {
                *s += c * paley_sign(idx, u) as f64;
            }
        }
    };

    let mut next = 0u64;
    if convention == Convention::OneBased {
        add_term(&mut partial, 0);
        next = 1;
    }
    for n in 1..=n_max {
        let denom = n as f64 * weight.weight(n)?;
        for u in 0..cells {
            running[u] += partial[u];
            let v = (running[u] / denom).abs();
            if v > best[u] {
                best[u] = v;
                argmax[u] = n;
            }
        }
        if (next as usize) < cells {
            add_term(&mut partial, next);
        }
        next += 1;
    }
    Ok(MaximalResult {
        values: GridFn::new(res, best)?,
        argmax,
    })
}
