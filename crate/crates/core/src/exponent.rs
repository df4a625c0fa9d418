//! Exponents `p > 0` carried as exact fractions.
//!
//! Keeping `p = num/den` exact lets the atom sup-bound `|a| <= 2^{N/p}` be
//! checked without rounding: it is equivalent to `|a|^num <= 2^{N*den}`.

use alloc::format;
use core::fmt;
use core::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent {
    num: u32,
    den: u32,
}

impl Exponent {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::param("p", format!("{num}/{den} is not positive")));
        }
        let g = num.gcd(&den);
        Ok(Exponent {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numer(&self) -> u32 {
        self.num
    }

    pub fn denom(&self) -> u32 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `1/p - 2`, the exponent of the power weight.
    pub fn power_weight_exponent(&self) -> f64 {
        self.den as f64 / self.num as f64 - 2.0
    }

    /// True when `0 < p < 1/2`.
    pub fn below_half(&self) -> bool {
        2 * (self.num as u64) < self.den as u64
    }

    /// True when `0 < p < 1`.
    pub fn below_one(&self) -> bool {
        self.num < self.den
    }

    pub(crate) fn require_below_half(&self) -> Result<()> {
        if self.below_half() {
            Ok(())
        } else {
            Err(Error::param("p", format!("{self} is outside (0, 1/2)")))
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Accepts `"1/4"`, `"0.45"`, `"2"`. Decimals are converted exactly.
impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::param("p", format!("cannot parse `{s}` as a positive fraction"));
        if let Some((n, d)) = s.split_once('/') {
            let n: u32 = n.trim().parse().map_err(|_| bad())?;
            let d: u32 = d.trim().parse().map_err(|_| bad())?;
            return Exponent::new(n, d);
        }
        let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
        if frac_part.len() > 9 || (int_part.is_empty() && frac_part.is_empty()) {
            return Err(bad());
        }
        let int: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad())?
        };
        let scale = 10u64.pow(frac_part.len() as u32);
        let num = int
            .checked_mul(scale)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        let g = num.gcd(&scale);
        let (num, den) = (num / g, scale / g);
        let num = u32::try_from(num).map_err(|_| bad())?;
        let den = u32::try_from(den).map_err(|_| bad())?;
        Exponent::new(num, den)
    }
}
