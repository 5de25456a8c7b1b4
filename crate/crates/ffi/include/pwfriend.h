// Copyright 2026 The pwfriend Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PWFRIEND_H
#define PWFRIEND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. `PWF_STATUS_OK` is zero; the rest mirror the library's error kinds.
 */
typedef enum PwfStatus {
  PWF_STATUS_OK = 0,
  PWF_STATUS_NULL_POINTER = 1,
  /**
   * An enum value or index passed in is out of range.
   */
  PWF_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A Rust panic was caught at the boundary.
   */
  PWF_STATUS_PANIC = 3,
  PWF_STATUS_DIMENSION_MISMATCH = 10,
  PWF_STATUS_FACTOR_MISMATCH = 11,
  PWF_STATUS_NON_FINITE = 12,
  PWF_STATUS_NOT_PROJECTOR = 13,
  PWF_STATUS_NOT_UNITARY = 14,
  PWF_STATUS_NOT_HERMITIAN = 15,
  PWF_STATUS_NOT_NORMALIZED = 16,
  PWF_STATUS_UNORDERED_SCHEDULE = 17,
  PWF_STATUS_AT_EVENT_TIME = 18,
  PWF_STATUS_TIME_ORDER = 19,
  PWF_STATUS_NULL_CONDITION = 20,
  PWF_STATUS_UNSUPPORTED = 21,
  PWF_STATUS_DEGENERATE = 22,
  PWF_STATUS_INVALID_PARAMS = 23,
  PWF_STATUS_OUT_OF_FAMILY = 24,
} PwfStatus;

typedef enum PwfBranch {
  PWF_BRANCH_NONE = 0,
  PWF_BRANCH_PLUS = 1,
  PWF_BRANCH_MINUS = 2,
  PWF_BRANCH_ND1 = 3,
  PWF_BRANCH_ND2 = 4,
} PwfBranch;

typedef enum PwfRule {
  PWF_RULE_COLLAPSE = 0,
  PWF_RULE_UNITARY_NORMALIZED = 1,
  PWF_RULE_ONE_TIME_UNITARY = 2,
  PWF_RULE_UNITARY_CONSISTENT = 3,
} PwfRule;

typedef enum PwfExtension {
  PWF_EXTENSION_CYCLIC_SHIFT = 0,
  PWF_EXTENSION_TRANSPOSITION = 1,
} PwfExtension;

typedef enum PwfTableId {
  PWF_TABLE_ID_COLLAPSE = 0,
  PWF_TABLE_ID_NORMALIZED = 1,
  PWF_TABLE_ID_ONE_TIME = 2,
  PWF_TABLE_ID_NON_DISTURBING = 3,
  PWF_TABLE_ID_NORMALIZED_RATIO = 4,
  PWF_TABLE_ID_CANDIDATES = 5,
} PwfTableId;

/**
 * Opaque history handle.
 */
typedef struct PwfHistory PwfHistory;

/**
 * Scenario parameters. Phases in radians, times on the clock.
 */
typedef struct PwfParams {
  double a;
  double b;
  double phi_s;
  double alpha;
  double beta;
  double phi_sf;
  double t_f;
  double t_1;
  double t_w;
  double t_2;
} PwfParams;

typedef struct PwfComplex {
  double re;
  double im;
} PwfComplex;

/**
 * Rule value with its diagnostics. Diagnostics a rule does not produce are NaN.
 */
typedef struct PwfRuleResult {
  struct PwfComplex value;
  struct PwfComplex raw;
  bool valid;
  double imag;
  double negativity;
  double excess;
  double commutator;
  double norm_cond;
  double norm_complement;
} PwfRuleResult;

/**
 * Decoherence functional of the four two-time histories, row-major over
 * outcomes `(f, w)` in the order (up, yes), (up, no), (down, yes), (down, no).
 */
typedef struct PwfDecoherence {
  struct PwfComplex matrix[16];
  bool consistent;
  bool weakly_consistent;
  double max_off_diagonal;
} PwfDecoherence;

typedef struct PwfRatioRoots {
  double b_over_a_plus;
  double b_over_a_minus;
  double a_over_b_plus;
  double a_over_b_minus;
} PwfRatioRoots;

/**
 * Closed-form table, entries `[f * 2 + w]`. `*_defined[k]` is false where the
 * entry conditions on a null event or the table has no reversed block.
 */
typedef struct PwfTable {
  struct PwfComplex forward[4];
  bool forward_defined[4];
  struct PwfComplex reversed[4];
  bool reversed_defined[4];
  bool has_reversed;
  enum PwfBranch branch;
} PwfTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length plus one, or 0 if no
 * error has been recorded. `buf` may be null to query the length.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes of writes.
 */
size_t pwf_last_error(char *buf, size_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pwf_version(void);

/**
 * Generic reference point: a = 0.9, α = β = 1/√2, zero phases, times 0, 1, 2, 3.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum PwfStatus pwf_params_generic(struct PwfParams *out);

/**
 * Non-disturbing point for `branch` (a `PwfBranch`, ND1 or ND2).
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum PwfStatus pwf_params_non_disturbing(double alpha,
                                         double beta,
                                         uint32_t branch,
                                         struct PwfParams *out);

/**
 * Builds the history state of the Wigner's-friend setup. `extension` is a
 * `PwfExtension`.
 *
 * # Safety
 * `params` must be null or point to a valid `PwfParams`; `out` must be null or
 * valid for writes. The handle written to `*out` is owned by the caller.
 */
enum PwfStatus pwf_history_new(const struct PwfParams *params,
                               uint32_t extension,
                               struct PwfHistory **out);

/**
 * Releases a handle from [`pwf_history_new`]. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void pwf_history_free(struct PwfHistory *h);

/**
 * Evaluates `rule` (a `PwfRule`) for Friend outcome `f` at `t_1` and Wigner outcome `w` at
 * `t_2`. Forward is `P(w | f)`; `reversed` gives `P(f | w)`.
 * Conditioning on a null event returns `PWF_STATUS_NULL_CONDITION`.
 *
 * # Safety
 * `h` must be null or a live handle; `out` must be null or valid for writes.
 */
enum PwfStatus pwf_history_eval(const struct PwfHistory *h,
                                uint32_t rule,
                                uint32_t f,
                                uint32_t w,
                                bool reversed,
                                double tol,
                                struct PwfRuleResult *out);

/**
 * Decoherence functional of the two-time family, starting one unit before `t_F`.
 *
 * # Safety
 * `h` must be null or a live handle; `out` must be null or valid for writes.
 */
enum PwfStatus pwf_history_decoherence(const struct PwfHistory *h,
                                       double tol,
                                       struct PwfDecoherence *out);

/**
 * Normalization residuals `r1`, `r2` of the two-time unitary rule and whether
 * both vanish within `tol`.
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum PwfStatus pwf_def2a_residuals(const struct PwfParams *params,
                                   double tol,
                                   double *r1,
                                   double *r2,
                                   bool *satisfied);

/**
 * Roots of the normalization conditions for `b/a` and `a/b`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum PwfStatus pwf_solve_ratios(double alpha, double beta, double phi, struct PwfRatioRoots *out);

/**
 * Distance to the nearest non-disturbing point and the matching branch
 * (`PWF_BRANCH_NONE` when farther than `tol`).
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum PwfStatus pwf_nondisturbance(const struct PwfParams *params,
                                  double tol,
                                  double *distance,
                                  enum PwfBranch *branch);

/**
 * Closed-form table `id` (a `PwfTableId`) at `params`. `branch` (a
 * `PwfBranch`) selects the normalized
 * table's root (`PWF_BRANCH_NONE` picks the one matching the parameters).
 *
 * # Safety
 * Pointers must be null or valid.
 */
enum PwfStatus pwf_eval_table(uint32_t id,
                              const struct PwfParams *params,
                              uint32_t branch,
                              struct PwfTable *out);

/**
 * Largest deviation of any rule from the textbook two-time probability over
 * `trials` random experiments without friends.
 *
 * # Safety
 * `worst` must be null or valid for writes.
 */
enum PwfStatus pwf_regress(uint64_t seed, size_t trials, double *worst);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PWFRIEND_H */
