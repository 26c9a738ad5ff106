//! Exact integer and rational arithmetic, plus a memoized binomial engine.
//!
//! Every quantity in this crate is an [`ExactInt`] or an [`ExactRat`]; nothing
//! ever passes through floating point. Binomial coefficients are served from a
//! cache of full Pascal rows up to a configurable upper index, and computed by
//! the multiplicative formula above it.

use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision signed integer.
pub type ExactInt = BigInt;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type ExactRat = BigRational;

/// Largest upper index cached by the process-wide binomial engine.
pub const DEFAULT_ROW_CAP: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("binomial upper index must be non-negative, got {0}")]
    NegativeUpper(i64),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
}

/// Pascal-row cache. Rows `0..=cap` are materialized on demand and shared;
/// readers never block each other.
#[derive(Debug)]
pub struct BinomialCache {
    cap: usize,
    rows: RwLock<Vec<Arc<[ExactInt]>>>,
}

impl BinomialCache {
    pub fn new(cap: usize) -> Self {
        BinomialCache {
            cap,
            rows: RwLock::new(Vec::new()),
        }
    }

    /// Cache sized for sweeps with powers up to `r_max` and indices up to
    /// `k_max`: the largest upper index those sweeps reach is `4 * r_max * k_max`.
    pub fn for_sweep(r_max: usize, k_max: usize) -> Self {
        Self::new(4 * r_max.max(1) * k_max.max(1))
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// `C(n, k)`, zero when `k < 0` or `k > n`.
    pub fn choose(&self, n: usize, k: i64) -> ExactInt {
        if k < 0 || k as u64 > n as u64 {
            return ExactInt::zero();
        }
        let k = k as usize;
        if n <= self.cap {
            self.row(n)[k].clone()
        } else {
            multiplicative(n, k)
        }
    }

    /// Checked entry point: rejects a negative upper index.
    pub fn binomial(&self, n: i64, k: i64) -> Result<ExactInt, ExactError> {
        if n < 0 {
            return Err(ExactError::NegativeUpper(n));
        }
        Ok(self.choose(n as usize, k))
    }

    /// Row `(C(n,0), ..., C(n,n))`. Shared when `n` is within the cap.
    pub fn row(&self, n: usize) -> Arc<[ExactInt]> {
        if n > self.cap {
            return pascal_row_direct(n).into();
        }
        {
            let rows = self.rows.read().unwrap_or_else(|e| e.into_inner());
            if let Some(row) = rows.get(n) {
                return Arc::clone(row);
            }
        }
        let mut rows = self.rows.write().unwrap_or_else(|e| e.into_inner());
        while rows.len() <= n {
            let next: Arc<[ExactInt]> = match rows.last() {
                None => vec![ExactInt::one()].into(),
                Some(prev) => next_pascal_row(prev).into(),
            };
            rows.push(next);
        }
        Arc::clone(&rows[n])
    }
}

impl Default for BinomialCache {
    fn default() -> Self {
        Self::new(DEFAULT_ROW_CAP)
    }
}

fn next_pascal_row(prev: &[ExactInt]) -> Vec<ExactInt> {
    let mut next = Vec::with_capacity(prev.len() + 1);
    next.push(ExactInt::one());
    for w in prev.windows(2) {
        next.push(&w[0] + &w[1]);
    }
    next.push(ExactInt::one());
    next
}

fn multiplicative(n: usize, k: usize) -> ExactInt {
    let k = k.min(n - k);
    let mut acc = ExactInt::one();
    for t in 0..k {
        // acc * (n - t) is divisible by (t + 1) at every step
        acc *= n - t;
        acc /= t + 1;
    }
    acc
}

fn pascal_row_direct(n: usize) -> Vec<ExactInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut acc = ExactInt::one();
    row.push(acc.clone());
    for t in 0..n {
        acc *= n - t;
        acc /= t + 1;
        row.push(acc.clone());
    }
    row
}

fn global() -> &'static BinomialCache {
    static CACHE: OnceLock<BinomialCache> = OnceLock::new();
    CACHE.get_or_init(BinomialCache::default)
}

/// `C(n, k)` from the shared cache. Infallible form for internal sums.
pub fn choose(n: usize, k: i64) -> ExactInt {
    global().choose(n, k)
}

/// `C(n, k)` for `n >= 0`; zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> Result<ExactInt, ExactError> {
    global().binomial(n, k)
}

pub fn binomial_row(n: i64) -> Result<Vec<ExactInt>, ExactError> {
    if n < 0 {
        return Err(ExactError::NegativeUpper(n));
    }
    Ok(global().row(n as usize).to_vec())
}

/// Canonical rational `num / den`: lowest terms, sign on the numerator.
pub fn rat_reduce(num: ExactInt, den: ExactInt) -> Result<ExactRat, ExactError> {
    if den.is_zero() {
        return Err(ExactError::ZeroDenominator);
    }
    Ok(BigRational::new(num, den))
}

/// Parses `"a"` or `"a/b"` into a canonical rational.
pub fn parse_rat(s: &str) -> Result<ExactRat, ExactError> {
    let bad = || ExactError::ParseRational(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?)),
        Some((n, d)) => rat_reduce(
            n.trim().parse().map_err(|_| bad())?,
            d.trim().parse().map_err(|_| bad())?,
        ),
    }
}

/// `"a"` for integers, `"a/b"` otherwise.
pub fn format_rat(q: &ExactRat) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// True when `q` is canonical: positive denominator and coprime parts.
pub fn is_canonical(q: &ExactRat) -> bool {
    q.denom() > &ExactInt::zero() && q.numer().gcd(q.denom()).is_one()
}
