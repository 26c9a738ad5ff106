//! C ABI over `schmidt-core`.
//!
//! Conventions:
//! - every fallible function returns a [`SchmidtStatus`] and writes results
//!   through out-pointers;
//! - big integers and rationals cross the boundary as NUL-terminated decimal
//!   strings owned by the caller and released with [`schmidt_string_free`];
//! - tables and rows are opaque handles released with their `_free` function;
//! - on failure, [`schmidt_last_error`] describes the most recent error on the
//!   calling thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use schmidt_core::coeffs::{column_sums, table_for, table_series, CoeffTable, SchmidtRow};
use schmidt_core::exact::{binomial, format_rat, parse_rat};
use schmidt_core::guess::{fit_ansatz, solve_kernel_grid, SearchBounds};
use schmidt_core::oracle::{check_defining_identity, solve_implicit};
use schmidt_core::sequences::{franel, schmidt_poly, schmidt_s, strehl, PowerIndex};
use schmidt_core::verify::{sweep_integrality, verify_kernel, verify_lemma};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchmidtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    NotIntegral = 4,
    Singular = 5,
    Panic = 6,
}

/// Opaque coefficient table for one power `r`.
pub struct SchmidtTable {
    inner: CoeffTable,
}

/// Opaque row of coefficients `c(r; 0..=k_max)`.
pub struct SchmidtCoeffRow {
    inner: SchmidtRow,
}

struct FfiError {
    status: SchmidtStatus,
    message: String,
}

impl FfiError {
    fn new(status: SchmidtStatus, message: impl Into<String>) -> Self {
        FfiError {
            status,
            message: message.into(),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let msg = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

fn guard(f: impl FnOnce() -> Result<(), FfiError>) -> SchmidtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            SchmidtStatus::Ok
        }
        Ok(Err(e)) => {
            set_last_error(&e.message);
            e.status
        }
        Err(_) => {
            set_last_error("internal panic");
            SchmidtStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, FfiError> {
    p.as_mut()
        .ok_or_else(|| FfiError::new(SchmidtStatus::NullPointer, format!("{name} is null")))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, FfiError> {
    p.as_ref()
        .ok_or_else(|| FfiError::new(SchmidtStatus::NullPointer, format!("{name} is null")))
}

fn power(r: u32) -> Result<PowerIndex, FfiError> {
    PowerIndex::new(r).map_err(|e| FfiError::new(SchmidtStatus::InvalidArgument, e.to_string()))
}

fn index(v: u64, name: &str) -> Result<usize, FfiError> {
    usize::try_from(v).map_err(|_| {
        FfiError::new(
            SchmidtStatus::OutOfRange,
            format!("{name} does not fit in usize"),
        )
    })
}

fn write_string(dst: *mut *mut c_char, s: String) -> Result<(), FfiError> {
    let dst = unsafe { out(dst, "out")? };
    let c = CString::new(s)
        .map_err(|_| FfiError::new(SchmidtStatus::InvalidArgument, "embedded NUL"))?;
    *dst = c.into_raw();
    Ok(())
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn schmidt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn schmidt_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn schmidt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `C(n, k)` as a decimal string; zero when `k < 0` or `k > n`.
#[no_mangle]
pub unsafe extern "C" fn schmidt_binomial(
    n: i64,
    k: i64,
    out_value: *mut *mut c_char,
) -> SchmidtStatus {
    guard(|| {
        let v = binomial(n, k)
            .map_err(|e| FfiError::new(SchmidtStatus::InvalidArgument, e.to_string()))?;
        write_string(out_value, v.to_string())
    })
}

/// Schmidt number `sum_k C(n,k)^r C(n+k,k)^r`.
#[no_mangle]
pub unsafe extern "C" fn schmidt_number(
    r: u32,
    n: u64,
    out_value: *mut *mut c_char,
) -> SchmidtStatus {
    guard(|| write_string(out_value, schmidt_s(power(r)?, index(n, "n")?).to_string()))
}

/// Schmidt polynomial at `x`, given as `"a"` or `"a/b"`; result in the same
/// form.
#[no_mangle]
pub unsafe extern "C" fn schmidt_poly_eval(
    r: u32,
    n: u64,
    x: *const c_char,
    out_value: *mut *mut c_char,
) -> SchmidtStatus {
    guard(|| {
        let x = handle(x, "x")?;
        let x = CStr::from_ptr(x)
            .to_str()
            .map_err(|_| FfiError::new(SchmidtStatus::InvalidArgument, "x is not UTF-8"))?;
        let x = parse_rat(x)
            .map_err(|e| FfiError::new(SchmidtStatus::InvalidArgument, e.to_string()))?;
        let v = schmidt_poly(power(r)?, index(n, "n")?, &x);
        write_string(out_value, format_rat(&v))
    })
}

#[no_mangle]
pub unsafe extern "C" fn schmidt_franel(n: u64, out_value: *mut *mut c_char) -> SchmidtStatus {
    guard(|| write_string(out_value, franel(index(n, "n")?).to_string()))
}

#[no_mangle]
pub unsafe extern "C" fn schmidt_strehl(n: u64, out_value: *mut *mut c_char) -> SchmidtStatus {
    guard(|| write_string(out_value, strehl(index(n, "n")?).to_string()))
}

/// Builds the coefficient table for power `r` with rows `0..=k_max`.
#[no_mangle]
pub unsafe extern "C" fn schmidt_table_new(
    r: u32,
    k_max: u64,
    out_table: *mut *mut SchmidtTable,
) -> SchmidtStatus {
    guard(|| {
        let dst = out(out_table, "out_table")?;
        let inner = table_for(power(r)?, index(k_max, "k_max")?);
        *dst = Box::into_raw(Box::new(SchmidtTable { inner }));
        Ok(())
    })
}

/// Table for `r + 1` computed from `table`; `table` is left untouched.
#[no_mangle]
pub unsafe extern "C" fn schmidt_table_step(
    table: *const SchmidtTable,
    out_table: *mut *mut SchmidtTable,
) -> SchmidtStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let dst = out(out_table, "out_table")?;
        *dst = Box::into_raw(Box::new(SchmidtTable {
            inner: t.inner.step(),
        }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn schmidt_table_free(table: *mut SchmidtTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

#[no_mangle]
pub unsafe extern "C" fn schmidt_table_info(
    table: *const SchmidtTable,
    out_r: *mut u32,
    out_k_max: *mut u64,
) -> SchmidtStatus {
    guard(|| {
        let t = handle(table, "table")?;
        *out(out_r, "out_r")? = t.inner.r().get();
        *out(out_k_max, "out_k_max")? = t.inner.k_max() as u64;
        Ok(())
    })
}

/// Entry `a(r; k, j)`; zero outside the support window, `OUT_OF_RANGE` for
/// `k > k_max`.
#[no_mangle]
pub unsafe extern "C" fn schmidt_table_entry(
    table: *const SchmidtTable,
    k: u64,
    j: u64,
    out_value: *mut *mut c_char,
) -> SchmidtStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let v = t
            .inner
            .try_entry(index(k, "k")?, index(j, "j")?)
            .map_err(|e| FfiError::new(SchmidtStatus::OutOfRange, e.to_string()))?;
        write_string(out_value, v.to_string())
    })
}

/// Column sums of `table`: `c(r; 0..=k_max)`.
#[no_mangle]
pub unsafe extern "C" fn schmidt_row_from_table(
    table: *const SchmidtTable,
    out_row: *mut *mut SchmidtCoeffRow,
) -> SchmidtStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let dst = out(out_row, "out_row")?;
        *dst = Box::into_raw(Box::new(SchmidtCoeffRow {
            inner: column_sums(&t.inner),
        }));
        Ok(())
    })
}

/// `c(r; 0..=n_max)` by the rational triangular solve. Returns
/// `NOT_INTEGRAL` (and no row) if any value is fractional.
#[no_mangle]
pub unsafe extern "C" fn schmidt_row_implicit(
    r: u32,
    n_max: u64,
    out_row: *mut *mut SchmidtCoeffRow,
) -> SchmidtStatus {
    guard(|| {
        let dst = out(out_row, "out_row")?;
        let inner = solve_implicit(power(r)?, index(n_max, "n_max")?)
            .to_row()
            .map_err(|e| FfiError::new(SchmidtStatus::NotIntegral, e.to_string()))?;
        *dst = Box::into_raw(Box::new(SchmidtCoeffRow { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn schmidt_row_free(row: *mut SchmidtCoeffRow) {
    if !row.is_null() {
        drop(Box::from_raw(row));
    }
}

/// Number of values (`k_max + 1`).
#[no_mangle]
pub unsafe extern "C" fn schmidt_row_len(
    row: *const SchmidtCoeffRow,
    out_len: *mut u64,
) -> SchmidtStatus {
    guard(|| {
        *out(out_len, "out_len")? = handle(row, "row")?.inner.values.len() as u64;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn schmidt_row_value(
    row: *const SchmidtCoeffRow,
    k: u64,
    out_value: *mut *mut c_char,
) -> SchmidtStatus {
    guard(|| {
        let row = handle(row, "row")?;
        let v = row.inner.values.get(index(k, "k")?).ok_or_else(|| {
            FfiError::new(
                SchmidtStatus::OutOfRange,
                format!("k = {k} beyond row of length {}", row.inner.values.len()),
            )
        })?;
        write_string(out_value, v.to_string())
    })
}

/// Whether `row` satisfies the defining identity for `n = 0..=n_max`.
#[no_mangle]
pub unsafe extern "C" fn schmidt_row_check(
    row: *const SchmidtCoeffRow,
    n_max: u64,
    out_passed: *mut bool,
) -> SchmidtStatus {
    guard(|| {
        let row = handle(row, "row")?;
        let ok = check_defining_identity(row.inner.r, &row.inner, index(n_max, "n_max")?)
            .map_err(|e| FfiError::new(SchmidtStatus::OutOfRange, e.to_string()))?;
        *out(out_passed, "out_passed")? = ok;
        Ok(())
    })
}

/// Degree-bounded proof of row `k` of `table`. `out_degree_bound` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn schmidt_verify_lemma(
    table: *const SchmidtTable,
    k: u64,
    out_passed: *mut bool,
    out_degree_bound: *mut u64,
) -> SchmidtStatus {
    guard(|| {
        let t = handle(table, "table")?;
        let k = index(k, "k")?;
        if k > t.inner.k_max() {
            return Err(FfiError::new(
                SchmidtStatus::OutOfRange,
                format!("k = {k} beyond k_max = {}", t.inner.k_max()),
            ));
        }
        let res = verify_lemma(&t.inner, k);
        *out(out_passed, "out_passed")? = res.is_proof();
        if let Some(d) = out_degree_bound.as_mut() {
            *d = res.degree_bound as u64;
        }
        Ok(())
    })
}

/// Degree-bounded proof of the kernel identity at `(k, i)`.
/// `out_degree_bound` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn schmidt_verify_kernel(
    k: u64,
    i: u64,
    out_passed: *mut bool,
    out_degree_bound: *mut u64,
) -> SchmidtStatus {
    guard(|| {
        let res = verify_kernel(index(k, "k")?, index(i, "i")?);
        *out(out_passed, "out_passed")? = res.is_proof();
        if let Some(d) = out_degree_bound.as_mut() {
            *d = res.degree_bound as u64;
        }
        Ok(())
    })
}

/// Integrality of `c(r; n)` for every `r <= r_max`, `n <= n_max`.
#[no_mangle]
pub unsafe extern "C" fn schmidt_sweep_integrality(
    r_max: u32,
    n_max: u64,
    out_passed: *mut bool,
) -> SchmidtStatus {
    guard(|| {
        let rep = sweep_integrality(power(r_max)?, index(n_max, "n_max")?);
        *out(out_passed, "out_passed")? = rep.passed;
        Ok(())
    })
}

/// Solves the kernel on the grid `k <= k_max`, `j <= j_max` from tables
/// `r = 1..=r_max+1`, runs the default ansatz search and returns the matching
/// closed forms, one per line.
#[no_mangle]
pub unsafe extern "C" fn schmidt_fit_kernel(
    k_max: u64,
    j_max: u64,
    r_max: u32,
    out_candidates: *mut *mut c_char,
) -> SchmidtStatus {
    guard(|| {
        let r_max = power(r_max)?;
        let k_max = index(k_max, "k_max")?;
        let tables = table_series(r_max.next(), k_max);
        let solved = solve_kernel_grid(&tables, k_max, index(j_max, "j_max")?, r_max.as_usize())
            .map_err(|e| FfiError::new(SchmidtStatus::Singular, e.to_string()))?;
        let outcome = fit_ansatz(&solved, &SearchBounds::default());
        let text: Vec<String> = outcome.candidates.iter().map(ToString::to_string).collect();
        write_string(out_candidates, text.join("\n"))
    })
}
