//! Per-instance proofs of the two binomial-basis identities, plus the
//! integrality and explicit-formula sweeps.
//!
//! For fixed parameters both sides of each identity are polynomials in `n`.
//! `C(n,m) C(n+m,m)` has degree `2m` in `n`, so once the support of the
//! right-hand sum is known the degree is bounded and exact agreement at
//! `degree + 1` points proves the identity for those parameters.

use std::fmt;

use num_traits::Pow;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::CoeffTable;
use crate::exact::{choose, ExactInt};
use crate::oracle::solve_implicit;
use crate::sequences::{basis_weight, franel, franel_alt, strehl, PowerIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `(C(n,k) C(n+k,k))^r = sum_j a(r; k, j) C(n,j) C(n+j,j)`
    LemmaMain,
    /// `C(n,i)C(n+i,i) C(n,k)C(n+k,k) = sum_j C(k+i,i) C(k,j-i) C(j,k) C(n,j)C(n+j,j)`
    Kernel,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Identity::LemmaMain => "lemma_main",
            Identity::Kernel => "kernel",
        })
    }
}

/// First evaluation point where the two sides differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub n: usize,
    #[serde(with = "crate::serde_big::int")]
    pub lhs: ExactInt,
    #[serde(with = "crate::serde_big::int")]
    pub rhs: ExactInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheckResult {
    pub identity: Identity,
    /// `(r, k)` for the lemma, `(k, i)` for the kernel.
    pub parameters: (usize, usize),
    pub points_checked: usize,
    pub degree_bound: usize,
    pub passed: bool,
    pub first_failure: Option<Failure>,
}

impl IdentityCheckResult {
    /// A pass that also covered enough points to be a proof.
    pub fn is_proof(&self) -> bool {
        self.passed && self.points_checked > self.degree_bound
    }
}

fn check_points(
    identity: Identity,
    parameters: (usize, usize),
    degree_bound: usize,
    sides: impl Fn(usize) -> (ExactInt, ExactInt) + Sync,
) -> IdentityCheckResult {
    let first_failure = (0..=degree_bound).find_map(|n| {
        let (lhs, rhs) = sides(n);
        (lhs != rhs).then_some(Failure { n, lhs, rhs })
    });
    IdentityCheckResult {
        identity,
        parameters,
        points_checked: degree_bound + 1,
        degree_bound,
        passed: first_failure.is_none(),
        first_failure,
    }
}

/// Checks row `k` of `table` against the lemma at `n = 0..=2rk`.
///
/// Panics if `k` exceeds the table's `k_max`.
pub fn verify_lemma(table: &CoeffTable, k: usize) -> IdentityCheckResult {
    let r = table.r();
    let (lo, hi) = table.window(k);
    check_points(Identity::LemmaMain, (r.as_usize(), k), 2 * hi, |n| {
        let lhs = basis_weight(n, k).pow(r.get());
        let rhs = (lo..=hi.min(n))
            .map(|j| table.entry(k, j) * basis_weight(n, j))
            .sum();
        (lhs, rhs)
    })
}

/// Checks the kernel identity for `(k, i)` at `n = 0..=2(k+i)`. The `j`-sum is
/// supported on `max(k, i)..=k+i`.
pub fn verify_kernel(k: usize, i: usize) -> IdentityCheckResult {
    check_points(Identity::Kernel, (k, i), 2 * (k + i), |n| {
        let lhs = basis_weight(n, i) * basis_weight(n, k);
        let weight = choose(k + i, i as i64);
        let rhs = (k.max(i)..=k + i)
            .map(|j| {
                &weight * choose(k, j as i64 - i as i64) * choose(j, k as i64) * basis_weight(n, j)
            })
            .sum();
        (lhs, rhs)
    })
}

/// Lemma checks for every row of every table.
pub fn verify_lemma_grid(tables: &[CoeffTable]) -> Vec<IdentityCheckResult> {
    tables
        .par_iter()
        .flat_map_iter(|t| (0..=t.k_max()).map(move |k| verify_lemma(t, k)))
        .collect()
}

/// Kernel checks for all `k <= k_max`, `i <= i_max`, in row-major order.
pub fn verify_kernel_grid(k_max: usize, i_max: usize) -> Vec<IdentityCheckResult> {
    (0..=k_max)
        .flat_map(|k| (0..=i_max).map(move |i| (k, i)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, i)| verify_kernel(k, i))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralityEntry {
    pub r: PowerIndex,
    pub all_integral: bool,
    pub first_nonintegral_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralityReport {
    pub r_max: PowerIndex,
    pub n_max: usize,
    pub per_r: Vec<IntegralityEntry>,
    pub passed: bool,
}

/// Runs the implicit solve for every `r <= r_max` up to `n_max`.
pub fn sweep_integrality(r_max: PowerIndex, n_max: usize) -> IntegralityReport {
    let per_r: Vec<IntegralityEntry> = (1..=r_max.get())
        .into_par_iter()
        .map(|rv| {
            let r = PowerIndex::new(rv).expect("rv >= 1");
            let rep = solve_implicit(r, n_max);
            IntegralityEntry {
                r,
                all_integral: rep.all_integral,
                first_nonintegral_index: rep.first_nonintegral_index,
            }
        })
        .collect();
    IntegralityReport {
        r_max,
        n_max,
        passed: per_r.iter().all(|e| e.all_integral),
        per_r,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplicitFormula {
    Franel,
    FranelAlt,
    Strehl,
}

impl fmt::Display for ExplicitFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExplicitFormula::Franel => "franel",
            ExplicitFormula::FranelAlt => "franel_alt",
            ExplicitFormula::Strehl => "strehl",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub formula: ExplicitFormula,
    pub n: usize,
    /// Oracle value, `"a/b"` when not integral.
    pub oracle: String,
    #[serde(with = "crate::serde_big::int")]
    pub formula_value: ExactInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitCheckReport {
    pub n_max: usize,
    pub points_checked: usize,
    pub mismatches: Vec<Mismatch>,
    pub passed: bool,
}

/// Compares the implicit solve for `r = 2` with both Franel forms and for
/// `r = 3` with the Strehl form, for every `n <= n_max`.
pub fn cross_check_explicit(n_max: usize) -> ExplicitCheckReport {
    let two = solve_implicit(PowerIndex::new(2).expect("2 >= 1"), n_max);
    let three = solve_implicit(PowerIndex::new(3).expect("3 >= 1"), n_max);
    type Formula<'a> = (
        ExplicitFormula,
        &'a [crate::exact::ExactRat],
        fn(usize) -> ExactInt,
    );
    let formulas: [Formula; 3] = [
        (ExplicitFormula::Franel, &two.values, franel),
        (ExplicitFormula::FranelAlt, &two.values, franel_alt),
        (ExplicitFormula::Strehl, &three.values, strehl),
    ];
    let mut mismatches = Vec::new();
    for (formula, oracle, eval) in formulas {
        for (n, q) in oracle.iter().enumerate() {
            let value = eval(n);
            if !q.is_integer() || q.numer() != &value {
                mismatches.push(Mismatch {
                    formula,
                    n,
                    oracle: crate::exact::format_rat(q),
                    formula_value: value,
                });
            }
        }
    }
    ExplicitCheckReport {
        n_max,
        points_checked: 3 * (n_max + 1),
        passed: mismatches.is_empty(),
        mismatches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{table_for, table_series};
    use num_traits::Zero;

    fn r(v: u32) -> PowerIndex {
        PowerIndex::new(v).unwrap()
    }

    #[test]
    fn lemma_examples() {
        let res = verify_lemma(&table_for(r(1), 5), 5);
        assert!(res.is_proof());
        assert_eq!(res.degree_bound, 10);
        assert_eq!(res.parameters, (1, 5));

        let t2 = table_for(r(2), 1);
        let res = verify_lemma(&t2, 1);
        assert!(res.passed);
        assert_eq!(res.points_checked, 5);
        // n = 2 by hand: 36 = 2*6 + 4*6
        let lhs = basis_weight(2, 1).pow(2u32);
        let rhs = t2.entry(1, 1) * basis_weight(2, 1) + t2.entry(1, 2) * basis_weight(2, 2);
        assert_eq!((lhs.clone(), rhs), (ExactInt::from(36), ExactInt::from(36)));
    }

    #[test]
    fn kernel_examples() {
        let res = verify_kernel(0, 0);
        assert!(res.is_proof());
        assert_eq!((res.degree_bound, res.points_checked), (0, 1));

        let res = verify_kernel(1, 1);
        assert!(res.passed);
        assert_eq!((res.degree_bound, res.points_checked), (4, 5));

        let res = verify_kernel(3, 0);
        assert!(res.is_proof());
        assert_eq!(res.identity, Identity::Kernel);
    }

    #[test]
    fn sides_vanish_below_k() {
        for t in table_series(r(4), 8) {
            for k in 1..=8usize {
                for n in 0..k {
                    assert!(basis_weight(n, k).is_zero());
                    let rhs: ExactInt = (k..=t.window(k).1)
                        .map(|j| t.entry(k, j) * basis_weight(n, j))
                        .sum();
                    assert!(rhs.is_zero());
                }
            }
        }
    }

    #[test]
    fn lemma_grid_passes() {
        let results = verify_lemma_grid(&table_series(r(4), 8));
        assert_eq!(results.len(), 4 * 9);
        assert!(results.iter().all(IdentityCheckResult::is_proof));
    }

    #[test]
    fn kernel_grid_small() {
        let results = verify_kernel_grid(8, 8);
        assert_eq!(results.len(), 81);
        assert!(results.iter().all(IdentityCheckResult::is_proof));
        assert_eq!(results[10].parameters, (1, 1));
    }

    #[test]
    fn corrupted_entries_are_caught() {
        let t = table_for(r(3), 4);
        for k in 1..=4 {
            for j in k..=3 * k {
                let bad = t.with_entry_replaced(k, j, t.entry(k, j) + 1u8).unwrap();
                let res = verify_lemma(&bad, k);
                assert!(!res.passed, "k={k} j={j}");
                let fail = res.first_failure.unwrap();
                assert_eq!(fail.n, j);
                assert_eq!(&fail.rhs - &fail.lhs, basis_weight(j, j));
            }
        }
    }

    #[test]
    fn integrality_examples() {
        let rep = sweep_integrality(r(1), 50);
        assert!(rep.passed);
        let rep = sweep_integrality(r(4), 25);
        assert!(rep.passed);
        assert_eq!(rep.per_r.len(), 4);
        assert_eq!(rep.per_r[3].r, r(4));
    }

    #[test]
    fn explicit_examples() {
        assert!(cross_check_explicit(0).passed);
        let rep = cross_check_explicit(3);
        assert!(rep.passed);
        assert_eq!(rep.points_checked, 12);
    }

    #[test]
    fn result_json_roundtrip() {
        let t = table_for(r(2), 2);
        let bad = t.with_entry_replaced(2, 3, ExactInt::from(1)).unwrap();
        let res = verify_lemma(&bad, 2);
        let json = serde_json::to_string(&res).unwrap();
        assert!(json.contains(r#""identity":"lemma_main""#));
        let back: IdentityCheckResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, res);
    }
}
