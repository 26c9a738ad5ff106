//! Direct evaluation of the named binomial sums.
//!
//! All sums run over their exact support `0..=n`; terms outside it vanish
//! through the binomial convention `C(n, k) = 0` for `k > n`.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{choose, ExactInt, ExactRat};

/// Exponent `r >= 1` applied to each binomial factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PowerIndex(u32);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("power index must be at least 1, got {0}")]
pub struct InvalidPower(pub i64);

impl PowerIndex {
    pub const ONE: PowerIndex = PowerIndex(1);

    pub fn new(r: u32) -> Result<Self, InvalidPower> {
        if r == 0 {
            Err(InvalidPower(0))
        } else {
            Ok(PowerIndex(r))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    pub fn next(self) -> PowerIndex {
        PowerIndex(self.0 + 1)
    }
}

impl TryFrom<u32> for PowerIndex {
    type Error = InvalidPower;
    fn try_from(r: u32) -> Result<Self, Self::Error> {
        PowerIndex::new(r)
    }
}

impl TryFrom<i64> for PowerIndex {
    type Error = InvalidPower;
    fn try_from(r: i64) -> Result<Self, Self::Error> {
        u32::try_from(r)
            .ok()
            .and_then(|r| PowerIndex::new(r).ok())
            .ok_or(InvalidPower(r))
    }
}

impl From<PowerIndex> for u32 {
    fn from(r: PowerIndex) -> u32 {
        r.0
    }
}

impl fmt::Display for PowerIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `C(n,k) * C(n+k,k)`; zero for `k > n`.
pub fn basis_weight(n: usize, k: usize) -> ExactInt {
    if k > n {
        return ExactInt::zero();
    }
    choose(n, k as i64) * choose(n + k, k as i64)
}

/// Schmidt number `sum_k C(n,k)^r C(n+k,k)^r`. For `r = 2` these are the
/// Apéry numbers.
pub fn schmidt_s(r: PowerIndex, n: usize) -> ExactInt {
    (0..=n).map(|k| basis_weight(n, k).pow(r.get())).sum()
}

/// Schmidt polynomial `sum_k C(n,k)^r C(n+k,k)^r x^k` evaluated at a rational
/// point (Horner, highest degree first).
pub fn schmidt_poly(r: PowerIndex, n: usize, x: &ExactRat) -> ExactRat {
    let mut acc = ExactRat::zero();
    for k in (0..=n).rev() {
        acc = acc * x + BigRational::from_integer(basis_weight(n, k).pow(r.get()));
    }
    acc
}

/// Franel number `sum_j C(n,j)^3`.
pub fn franel(n: usize) -> ExactInt {
    (0..=n).map(|j| choose(n, j as i64).pow(3u32)).sum()
}

/// Second Franel form `sum_j C(n,j)^2 C(2j,n)`; terms with `2j < n` vanish.
pub fn franel_alt(n: usize) -> ExactInt {
    (n.div_ceil(2)..=n)
        .map(|j| choose(n, j as i64).pow(2u32) * choose(2 * j, n as i64))
        .sum()
}

/// `sum_j C(n,j)^2 C(2j,j)^2 C(2j,n-j)`, the closed form of the `r = 3`
/// coefficients. `C(2j, n-j)` vanishes for `3j < n`.
pub fn strehl(n: usize) -> ExactInt {
    (n.div_ceil(3)..=n)
        .map(|j| {
            let cj = choose(n, j as i64);
            let central = choose(2 * j, j as i64);
            &cj * &cj * &central * &central * choose(2 * j, (n - j) as i64)
        })
        .sum()
}
