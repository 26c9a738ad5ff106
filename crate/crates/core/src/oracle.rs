//! Ground-truth route: solve the defining triangular system
//!
//! ```text
//! S(r; n) = sum_{k<=n} C(n,k) C(n+k,k) c(r; k),   n = 0, 1, 2, ...
//! ```
//!
//! by forward substitution over the rationals. Integrality of the result is
//! observed, never assumed.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffs::{RowMethod, SchmidtRow};
use crate::exact::{ExactInt, ExactRat};
use crate::sequences::{basis_weight, schmidt_s, PowerIndex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("row has {len} values but n_max = {n_max} needs {}", n_max + 1)]
    RowTooShort { len: usize, n_max: usize },
    #[error("value at index {0} is not an integer")]
    NotIntegral(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicitSolveReport {
    pub r: PowerIndex,
    pub n_max: usize,
    #[serde(with = "crate::serde_big::rat_vec")]
    pub values: Vec<ExactRat>,
    pub all_integral: bool,
    pub first_nonintegral_index: Option<usize>,
}

impl ImplicitSolveReport {
    /// The solved values as a [`SchmidtRow`], if they are all integers.
    pub fn to_row(&self) -> Result<SchmidtRow, OracleError> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, q)| {
                if q.is_integer() {
                    Ok(q.numer().clone())
                } else {
                    Err(OracleError::NotIntegral(k))
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(SchmidtRow {
            r: self.r,
            values,
            method: RowMethod::ImplicitSolve,
        })
    }
}

/// `c(r; 0..=n_max)` by forward substitution. The pivot `C(2n, n)` is never
/// zero, so the system always has a unique solution.
pub fn solve_implicit(r: PowerIndex, n_max: usize) -> ImplicitSolveReport {
    let mut values: Vec<ExactRat> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let known: ExactRat = values
            .iter()
            .enumerate()
            .map(|(k, v)| v * BigRational::from_integer(basis_weight(n, k)))
            .sum();
        let rhs = BigRational::from_integer(schmidt_s(r, n)) - known;
        values.push(rhs / BigRational::from_integer(basis_weight(n, n)));
    }
    let first_nonintegral_index = values.iter().position(|q| !q.is_integer());
    ImplicitSolveReport {
        r,
        n_max,
        values,
        all_integral: first_nonintegral_index.is_none(),
        first_nonintegral_index,
    }
}

/// Re-checks any row against the defining identity for `n = 0..=n_max`.
pub fn check_defining_identity(
    r: PowerIndex,
    row: &SchmidtRow,
    n_max: usize,
) -> Result<bool, OracleError> {
    Ok(first_violation(r, &row.values, n_max)?.is_none())
}

/// Smallest `n <= n_max` at which `values` break the defining identity.
pub fn first_violation(
    r: PowerIndex,
    values: &[ExactInt],
    n_max: usize,
) -> Result<Option<usize>, OracleError> {
    if values.len() <= n_max {
        return Err(OracleError::RowTooShort {
            len: values.len(),
            n_max,
        });
    }
    Ok((0..=n_max).find(|&n| {
        let rhs: ExactInt = (0..=n).map(|k| basis_weight(n, k) * &values[k]).sum();
        rhs != schmidt_s(r, n)
    }))
}
