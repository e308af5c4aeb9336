#ifndef CURRENT_LAB_H
#define CURRENT_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum ClStatus {
  ClOk = 0,
  ClErrNullPointer = 1,
  ClErrInput = 2,
  ClErrDomain = 3,
  ClErrConfig = 4,
  ClErrNumerical = 5,
  ClErrNoSolution = 6,
  ClErrIo = 7,
  ClErrInvalidUtf8 = 8,
  ClErrPanic = 9,
} ClStatus;

/**
 * Classification of a module charge.
 */
typedef enum ClChargeKind {
  ClIntegrableHighest = 0,
  ClIntegrableLowest = 1,
  ClNonintegrable = 2,
} ClChargeKind;

/**
 * Genus-2 curve `y² = (z² − s²)(z² − t²)(z² − r²)`.
 */
typedef struct ClCurve ClCurve;

/**
 * Period matrices and `τ` of a curve.
 */
typedef struct ClPeriodData ClPeriodData;

/**
 * Outcome of a rational-ratio search.
 */
typedef struct ClSearchResult ClSearchResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the
 * library and valid until the next failing call on the same thread.
 */
const char *cl_last_error_message(void);

/**
 * Release a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cl_string_free(char *s);

/**
 * Create a curve; requires `0 < s < t < r`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum ClStatus cl_curve_new(double s, double t, double r, struct ClCurve **out);

/**
 * # Safety
 * `curve` must come from [`cl_curve_new`] and not have been freed; null is ignored.
 */
void cl_curve_free(struct ClCurve *curve);

/**
 * Periods `(a1, a2, b1, b2)` of `α = z dz / y` in reduced form, written to
 * four-element arrays.
 *
 * # Safety
 * `curve` must be a live handle; `re` and `im` must each hold four doubles.
 */
enum ClStatus cl_alpha_periods(const struct ClCurve *curve, double *re, double *im);

/**
 * Compute the period data of `curve`.
 *
 * # Safety
 * `curve` must be a live handle and `out` valid writable storage.
 */
enum ClStatus cl_period_data_new(const struct ClCurve *curve, struct ClPeriodData **out);

/**
 * # Safety
 * `data` must come from [`cl_period_data_new`] and not have been freed; null is ignored.
 */
void cl_period_data_free(struct ClPeriodData *data);

/**
 * `τ` in row-major order, written to four-element arrays.
 *
 * # Safety
 * `data` must be a live handle; `re` and `im` must each hold four doubles.
 */
enum ClStatus cl_period_data_tau(const struct ClPeriodData *data, double *re, double *im);

/**
 * Ascending eigenvalues of `Im τ`, written to a two-element array.
 *
 * # Safety
 * `data` must be a live handle; `out` must hold two doubles.
 */
enum ClStatus cl_period_data_im_tau_eigenvalues(const struct ClPeriodData *data, double *out);

/**
 * Search `s ∈ (0, t)` with period ratio `p/q`. On `ClErrNoSolution` the
 * attained ratio range is in the last-error message.
 *
 * # Safety
 * `out` must be valid writable storage for a handle.
 */
enum ClStatus cl_search_rational(uint64_t p,
                                 uint64_t q,
                                 double t,
                                 double r,
                                 struct ClSearchResult **out);

/**
 * # Safety
 * `result` must come from [`cl_search_rational`] and not have been freed; null is ignored.
 */
void cl_search_result_free(struct ClSearchResult *result);

/**
 * The branch point `s` found by the search.
 *
 * # Safety
 * `result` must be a live handle.
 */
double cl_search_result_s(const struct ClSearchResult *result);

/**
 * Ratio reached by the search.
 *
 * # Safety
 * `result` must be a live handle.
 */
double cl_search_result_ratio(const struct ClSearchResult *result);

/**
 * Scaled `(a1, b2)` periods, written to two-element arrays.
 *
 * # Safety
 * `result` must be a live handle; `re` and `im` must each hold two doubles.
 */
enum ClStatus cl_search_result_scaled_periods(const struct ClSearchResult *result,
                                              double *re,
                                              double *im);

/**
 * Classify the charge `re + i·im`.
 */
enum ClChargeKind cl_classify_charge(double re, double im);

/**
 * Run a subcommand with command-line style arguments, e.g.
 * `{"periods", "--curve", "1,2,3"}`. Writes the JSON report to
 * `out_json` (release with [`cl_string_free`]; null when the run fails before
 * producing a report) and the process exit code (0 pass, 1 fail, 2 config
 * error) to `out_exit_code`.
 *
 * # Safety
 * `argv` must point to `argc` valid NUL-terminated strings; the out
 * pointers must be valid writable storage.
 */
enum ClStatus cl_run(int argc, const char *const *argv, int *out_exit_code, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURRENT_LAB_H */
