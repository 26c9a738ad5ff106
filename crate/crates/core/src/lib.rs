//! Exact computation of the Schmidt coefficients `c(r; k)`, defined by
//!
//! ```text
//! sum_k C(n,k)^r C(n+k,k)^r = sum_k C(n,k) C(n+k,k) c(r; k),   n >= 0,
//! ```
//!
//! by two independent routes (column sums of an integer coefficient table, and
//! a rational triangular solve), together with per-instance proofs of the
//! underlying binomial identities and a small ansatz search that rediscovers
//! the table recursion from data.

pub mod cli;
pub mod coeffs;
pub mod exact;
pub mod guess;
pub mod oracle;
pub mod sequences;
pub mod serde_big;
pub mod verify;

pub use coeffs::{
    c_from_table, column_sums, table_for, table_series, CoeffTable, RowMethod, SchmidtRow,
};
pub use exact::{binomial, binomial_row, rat_reduce, ExactInt, ExactRat};
pub use oracle::{check_defining_identity, solve_implicit, ImplicitSolveReport};
pub use sequences::{
    basis_weight, franel, franel_alt, schmidt_poly, schmidt_s, strehl, PowerIndex,
};
pub use verify::{
    cross_check_explicit, sweep_integrality, verify_kernel, verify_lemma, IdentityCheckResult,
};
