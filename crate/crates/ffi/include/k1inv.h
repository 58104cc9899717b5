#ifndef K1INV_H
#define K1INV_H

/* This header is generated by cbindgen from crates/ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Report format selector.
 */
typedef enum K1invFormat {
  K1INV_FORMAT_TEXT = 0,
  K1INV_FORMAT_JSON = 1,
} K1invFormat;

/**
 * Status code returned by every entry point.
 */
typedef enum K1invStatus {
  /**
   * The call succeeded and all cross-checks passed.
   */
  K1INV_STATUS_OK = 0,
  /**
   * The computation ran but a cross-check or exactness verification
   * failed; the report explains which.
   */
  K1INV_STATUS_CHECK_FAILED = 1,
  /**
   * The input could not be parsed or validated.
   */
  K1INV_STATUS_INPUT_ERROR = 2,
  /**
   * A required pointer argument was null.
   */
  K1INV_STATUS_NULL_POINTER = 3,
  /**
   * An internal panic was caught at the boundary.
   */
  K1INV_STATUS_INTERNAL_ERROR = 4,
} K1invStatus;

/**
 * Opaque handle to a parsed and fully validated problem.
 */
typedef struct K1invProblem K1invProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse and validate a problem document.
 *
 * On success writes a handle to `out` and returns `Ok`. On failure returns
 * `InputError` and, when `error_out` is non-null, writes a message there
 * (release it with `k1inv_string_free`).
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` and `error_out`, when
 * non-null, must be writable.
 */
enum K1invStatus k1inv_problem_parse(const uint8_t *data,
                                     size_t len,
                                     struct K1invProblem **out,
                                     char **error_out);

/**
 * Release a problem handle. Accepts null.
 *
 * # Safety
 * `problem` must be a handle from `k1inv_problem_parse` that has not been
 * freed yet, or null.
 */
void k1inv_problem_free(struct K1invProblem *problem);

/**
 * Execute the tasks of a problem and write the rendered report to
 * `report_out`.
 *
 * `oracle` forces the brute-force verification paths, mirroring the
 * `oracle` CLI subcommand. Returns `CheckFailed` when any cross-check or
 * exactness verification fails; the report is still written in that case.
 *
 * # Safety
 * `problem` must be a live handle from `k1inv_problem_parse`; `report_out`
 * must be writable.
 */
enum K1invStatus k1inv_problem_run(const struct K1invProblem *problem,
                                   enum K1invFormat format,
                                   bool oracle,
                                   char **report_out);

/**
 * Run the exactness suites over every module of a problem.
 *
 * # Safety
 * Same contract as `k1inv_problem_run`.
 */
enum K1invStatus k1inv_problem_verify(const struct K1invProblem *problem,
                                      enum K1invFormat format,
                                      char **report_out);

/**
 * Run the built-in example corpus and write the rendered report.
 *
 * # Safety
 * `report_out` must be writable.
 */
enum K1invStatus k1inv_corpus(enum K1invFormat format, char **report_out);

/**
 * Release a string returned by this library. Accepts null.
 *
 * # Safety
 * `s` must be a string returned by this library that has not been freed.
 */
void k1inv_string_free(char *s);

/**
 * Library version as a static string; do not free.
 */
const char *k1inv_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* K1INV_H */
