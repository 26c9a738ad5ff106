//! Integer coefficient tables `a(r; k, j)` expressing `C(n,k)^r C(n+k,k)^r`
//! in the basis `C(n,j) C(n+j,j)`, built by the r-free recursion
//!
//! ```text
//! a(r+1; k, j) = sum_i C(k+i, i) C(k, j-i) C(j, k) a(r; k, i)
//! ```
//!
//! starting from the identity at `r = 1`. Only integer arithmetic is used.
//! Row `k` is stored densely over its support window `k..=r*k`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{choose, ExactInt};
use crate::sequences::PowerIndex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("row {k} is beyond the table's k_max = {k_max}")]
    RowOutOfRange { k: usize, k_max: usize },
    #[error("({k}, {j}) lies outside the support window {k}..={hi}")]
    OutsideSupport { k: usize, j: usize, hi: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTable {
    r: PowerIndex,
    rows: Vec<Vec<ExactInt>>,
}

impl CoeffTable {
    /// The `r = 1` table: one on the diagonal, zero elsewhere.
    pub fn base(k_max: usize) -> Self {
        CoeffTable {
            r: PowerIndex::ONE,
            rows: vec![vec![ExactInt::from(1u8)]; k_max + 1],
        }
    }

    pub fn r(&self) -> PowerIndex {
        self.r
    }

    pub fn k_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// Inclusive support window `(k, r*k)` of row `k`.
    pub fn window(&self, k: usize) -> (usize, usize) {
        (k, self.r.as_usize() * k)
    }

    /// `a(r; k, j)`, zero outside the support window.
    ///
    /// Panics when `k > k_max`; use [`CoeffTable::try_entry`] for a checked read.
    pub fn entry(&self, k: usize, j: usize) -> &ExactInt {
        self.try_entry(k, j).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_entry(&self, k: usize, j: usize) -> Result<&ExactInt, CoeffError> {
        let row = self.rows.get(k).ok_or(CoeffError::RowOutOfRange {
            k,
            k_max: self.k_max(),
        })?;
        Ok(j.checked_sub(k)
            .and_then(|off| row.get(off))
            .unwrap_or(&ExactInt::ZERO))
    }

    /// Stored entries of row `k`, indexed from `j = k`.
    pub fn row(&self, k: usize) -> &[ExactInt] {
        &self.rows[k]
    }

    /// Every stored `(k, j, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &ExactInt)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().enumerate().map(move |(off, v)| (k, k + off, v)))
    }

    /// One recursion step: the table for `r + 1` over the same rows.
    pub fn step(&self) -> CoeffTable {
        let r = self.r.as_usize();
        let rows = (0..self.rows.len())
            .into_par_iter()
            .map(|k| step_row(&self.rows[k], k, r))
            .collect();
        CoeffTable {
            r: self.r.next(),
            rows,
        }
    }

    /// Copy of this table with one in-window entry replaced. Meant for
    /// building perturbed tables in mutation checks.
    pub fn with_entry_replaced(
        &self,
        k: usize,
        j: usize,
        value: ExactInt,
    ) -> Result<CoeffTable, CoeffError> {
        let (lo, hi) = self.window(k);
        if k > self.k_max() {
            return Err(CoeffError::RowOutOfRange {
                k,
                k_max: self.k_max(),
            });
        }
        if j < lo || j > hi {
            return Err(CoeffError::OutsideSupport { k, j, hi });
        }
        let mut out = self.clone();
        out.rows[k][j - lo] = value;
        Ok(out)
    }

    /// Builds a table from explicit rows; row `k` must have `(r-1)*k + 1`
    /// entries.
    pub fn from_rows(r: PowerIndex, rows: Vec<Vec<ExactInt>>) -> Option<CoeffTable> {
        let ok = !rows.is_empty()
            && rows
                .iter()
                .enumerate()
                .all(|(k, row)| row.len() == (r.as_usize() - 1) * k + 1);
        ok.then_some(CoeffTable { r, rows })
    }
}

// i runs over max(k, j-k)..=min(j, r*k): C(k, j-i) needs j-k <= i <= j and the
// previous table is supported on k..=r*k.
fn step_row(prev: &[ExactInt], k: usize, r: usize) -> Vec<ExactInt> {
    let hi = (r + 1) * k;
    (k..=hi)
        .map(|j| {
            let lo_i = k.max(j - k);
            let hi_i = j.min(r * k);
            debug_assert!(lo_i <= hi_i);
            let inner: ExactInt = (lo_i..=hi_i)
                .map(|i| choose(k + i, i as i64) * choose(k, (j - i) as i64) * &prev[i - k])
                .sum();
            inner * choose(j, k as i64)
        })
        .collect()
}

/// Table for power `r` with rows `0..=k_max`.
pub fn table_for(r: PowerIndex, k_max: usize) -> CoeffTable {
    let mut t = CoeffTable::base(k_max);
    while t.r() < r {
        t = t.step();
    }
    t
}

/// Tables for powers `1..=r_max`, each with rows `0..=k_max`.
pub fn table_series(r_max: PowerIndex, k_max: usize) -> Vec<CoeffTable> {
    let mut out = vec![CoeffTable::base(k_max)];
    while out.len() < r_max.as_usize() {
        let next = out.last().expect("non-empty").step();
        out.push(next);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowMethod {
    ColumnSum,
    ImplicitSolve,
}

impl fmt::Display for RowMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowMethod::ColumnSum => "column_sum",
            RowMethod::ImplicitSolve => "implicit_solve",
        })
    }
}

/// The values `c(r; 0..=K)` with the route that produced them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchmidtRow {
    pub r: PowerIndex,
    #[serde(with = "crate::serde_big::int_vec")]
    pub values: Vec<ExactInt>,
    pub method: RowMethod,
}

/// Column sums `c(r; k) = sum_i a(r; i, k)` over `i` in `ceil(k/r)..=k`.
pub fn column_sums(table: &CoeffTable) -> SchmidtRow {
    let r = table.r().as_usize();
    let values = (0..=table.k_max())
        .map(|k| (k.div_ceil(r)..=k).map(|i| table.entry(i, k)).sum())
        .collect();
    SchmidtRow {
        r: table.r(),
        values,
        method: RowMethod::ColumnSum,
    }
}

/// `c(r; 0..=k_max)` by the table route.
pub fn c_from_table(r: PowerIndex, k_max: usize) -> SchmidtRow {
    column_sums(&table_for(r, k_max))
}
