#ifndef SCHMIDT_H
#define SCHMIDT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes shared by every entry point.
 */
typedef enum SchmidtStatus {
  SCHMIDT_STATUS_OK = 0,
  SCHMIDT_STATUS_NULL_POINTER = 1,
  SCHMIDT_STATUS_INVALID_ARGUMENT = 2,
  SCHMIDT_STATUS_OUT_OF_RANGE = 3,
  SCHMIDT_STATUS_NOT_INTEGRAL = 4,
  SCHMIDT_STATUS_SINGULAR = 5,
  SCHMIDT_STATUS_PANIC = 6,
} SchmidtStatus;

/*
 Opaque row of coefficients `c(r; 0..=k_max)`.
 */
typedef struct SchmidtCoeffRow SchmidtCoeffRow;

/*
 Opaque coefficient table for one power `r`.
 */
typedef struct SchmidtTable SchmidtTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Crate version as a static NUL-terminated string.
 */
const char *schmidt_version(void);

/*
 Message for the last failed call on this thread, or NULL. Valid until the
 next call into this library on the same thread.
 */
const char *schmidt_last_error(void);

/*
 Releases a string returned by this library. NULL is ignored.
 */
void schmidt_string_free(char *s);

/*
 `C(n, k)` as a decimal string; zero when `k < 0` or `k > n`.
 */
enum SchmidtStatus schmidt_binomial(int64_t n, int64_t k, char **out_value);

/*
 Schmidt number `sum_k C(n,k)^r C(n+k,k)^r`.
 */
enum SchmidtStatus schmidt_number(uint32_t r, uint64_t n, char **out_value);

/*
 Schmidt polynomial at `x`, given as `"a"` or `"a/b"`; result in the same
 form.
 */
enum SchmidtStatus schmidt_poly_eval(uint32_t r, uint64_t n, const char *x, char **out_value);

enum SchmidtStatus schmidt_franel(uint64_t n, char **out_value);

enum SchmidtStatus schmidt_strehl(uint64_t n, char **out_value);

/*
 Builds the coefficient table for power `r` with rows `0..=k_max`.
 */
enum SchmidtStatus schmidt_table_new(uint32_t r, uint64_t k_max, struct SchmidtTable **out_table);

/*
 Table for `r + 1` computed from `table`; `table` is left untouched.
 */
enum SchmidtStatus schmidt_table_step(const struct SchmidtTable *table,
                                      struct SchmidtTable **out_table);

void schmidt_table_free(struct SchmidtTable *table);

enum SchmidtStatus schmidt_table_info(const struct SchmidtTable *table,
                                      uint32_t *out_r,
                                      uint64_t *out_k_max);

/*
 Entry `a(r; k, j)`; zero outside the support window, `OUT_OF_RANGE` for
 `k > k_max`.
 */
enum SchmidtStatus schmidt_table_entry(const struct SchmidtTable *table,
                                       uint64_t k,
                                       uint64_t j,
                                       char **out_value);

/*
 Column sums of `table`: `c(r; 0..=k_max)`.
 */
enum SchmidtStatus schmidt_row_from_table(const struct SchmidtTable *table,
                                          struct SchmidtCoeffRow **out_row);

/*
 `c(r; 0..=n_max)` by the rational triangular solve. Returns
 `NOT_INTEGRAL` (and no row) if any value is fractional.
 */
enum SchmidtStatus schmidt_row_implicit(uint32_t r,
                                        uint64_t n_max,
                                        struct SchmidtCoeffRow **out_row);

void schmidt_row_free(struct SchmidtCoeffRow *row);

/*
 Number of values (`k_max + 1`).
 */
enum SchmidtStatus schmidt_row_len(const struct SchmidtCoeffRow *row, uint64_t *out_len);

enum SchmidtStatus schmidt_row_value(const struct SchmidtCoeffRow *row,
                                     uint64_t k,
                                     char **out_value);

/*
 Whether `row` satisfies the defining identity for `n = 0..=n_max`.
 */
enum SchmidtStatus schmidt_row_check(const struct SchmidtCoeffRow *row,
                                     uint64_t n_max,
                                     bool *out_passed);

/*
 Degree-bounded proof of row `k` of `table`. `out_degree_bound` may be NULL.
 */
enum SchmidtStatus schmidt_verify_lemma(const struct SchmidtTable *table,
                                        uint64_t k,
                                        bool *out_passed,
                                        uint64_t *out_degree_bound);

/*
 Degree-bounded proof of the kernel identity at `(k, i)`.
 `out_degree_bound` may be NULL.
 */
enum SchmidtStatus schmidt_verify_kernel(uint64_t k,
                                         uint64_t i,
                                         bool *out_passed,
                                         uint64_t *out_degree_bound);

/*
 Integrality of `c(r; n)` for every `r <= r_max`, `n <= n_max`.
 */
enum SchmidtStatus schmidt_sweep_integrality(uint32_t r_max, uint64_t n_max, bool *out_passed);

/*
 Solves the kernel on the grid `k <= k_max`, `j <= j_max` from tables
 `r = 1..=r_max+1`, runs the default ansatz search and returns the matching
 closed forms, one per line.
 */
enum SchmidtStatus schmidt_fit_kernel(uint64_t k_max,
                                      uint64_t j_max,
                                      uint32_t r_max,
                                      char **out_candidates);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHMIDT_H */
