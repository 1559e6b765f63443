#ifndef GTERM_H
#define GTERM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes; the nonzero values match the command-line exit statuses
 * where one exists.
 */
typedef enum {
  GTERM_STATUS_OK = 0,
  GTERM_STATUS_VERIFICATION = 1,
  GTERM_STATUS_INVALID_INPUT = 2,
  GTERM_STATUS_BUDGET = 3,
  GTERM_STATUS_NO_METHOD = 4,
  GTERM_STATUS_NULL_POINTER = 5,
  GTERM_STATUS_NO_WITNESS = 6,
  GTERM_STATUS_PANIC = 7,
} GtermStatus;

typedef struct GtermAlgebra GtermAlgebra;

typedef struct GtermCircuit GtermCircuit;

typedef struct GtermGroup GtermGroup;

typedef struct GtermReport GtermReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into the library from the same thread.
 */
const char *gterm_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void gterm_string_free(char *s);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gterm_version(void);

/**
 * Parses an algebra file's JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
GtermStatus gterm_algebra_from_json(const char *json, GtermAlgebra **out);

/**
 * Universe size, or 0 for NULL.
 *
 * # Safety
 * `alg` must be NULL or a live handle.
 */
size_t gterm_algebra_size(const GtermAlgebra *alg);

/**
 * # Safety
 * `alg` must be NULL or a live handle, not used afterwards.
 */
void gterm_algebra_free(GtermAlgebra *alg);

/**
 * Parses a group file's JSON text (1-based cycle notation).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
GtermStatus gterm_group_from_json(const char *json, GtermGroup **out);

/**
 * Degree, or 0 for NULL.
 *
 * # Safety
 * `group` must be NULL or a live handle.
 */
size_t gterm_group_degree(const GtermGroup *group);

/**
 * Writes the group order to `out`.
 *
 * # Safety
 * `group` must be a live handle; `out` must be writable.
 */
GtermStatus gterm_group_order(const GtermGroup *group, size_t *out);

/**
 * # Safety
 * `group` must be NULL or a live handle, not used afterwards.
 */
void gterm_group_free(GtermGroup *group);

/**
 * Decides whether `alg` has a `group`-term. `method` is NULL for automatic
 * selection or one of "auto", "regular", "product", "brute",
 * "exhaustive-local"; `tuple_budget` 0 selects the default.
 *
 * # Safety
 * Handles must be live; `method` must be NULL or NUL-terminated; `out`
 * must be writable.
 */
GtermStatus gterm_decide(const GtermAlgebra *alg,
                         const GtermGroup *group,
                         const char *method,
                         size_t tuple_budget,
                         bool want_witness,
                         GtermReport **out);

/**
 * Whether the decided condition holds; false for NULL.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
bool gterm_report_satisfied(const GtermReport *report);

/**
 * Name of the deciding method as a static string; NULL for NULL.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
const char *gterm_report_method(const GtermReport *report);

/**
 * The report as JSON, in the command-line report format.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
GtermStatus gterm_report_to_json(const GtermReport *report, char **out);

/**
 * Copies the witness circuit out of a report; `GTERM_STATUS_NO_WITNESS`
 * when it carries none.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
GtermStatus gterm_report_witness(const GtermReport *report, GtermCircuit **out);

/**
 * # Safety
 * `report` must be NULL or a live handle, not used afterwards.
 */
void gterm_report_free(GtermReport *report);

/**
 * Parses a circuit file's JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
GtermStatus gterm_circuit_from_json(const char *json, GtermCircuit **out);

/**
 * Number of inputs, or 0 for NULL.
 *
 * # Safety
 * `circuit` must be NULL or a live handle.
 */
size_t gterm_circuit_inputs(const GtermCircuit *circuit);

/**
 * Evaluates `circuit` in `alg` at `args[0..len]`.
 *
 * # Safety
 * Handles must be live; `args` must point to `len` readable values; `out`
 * must be writable.
 */
GtermStatus gterm_circuit_eval(const GtermCircuit *circuit,
                               const GtermAlgebra *alg,
                               const uint32_t *args,
                               size_t len,
                               uint32_t *out);

/**
 * The circuit as JSON.
 *
 * # Safety
 * `circuit` must be a live handle; `out` must be writable.
 */
GtermStatus gterm_circuit_to_json(const GtermCircuit *circuit, char **out);

/**
 * # Safety
 * `circuit` must be NULL or a live handle, not used afterwards.
 */
void gterm_circuit_free(GtermCircuit *circuit);

/**
 * Whether the cyclic condition of `pi` implies that of `rho`; both are
 * 1-based cycle notation on `degree` points.
 *
 * # Safety
 * Strings must be NUL-terminated; `out` must be writable.
 */
GtermStatus gterm_compare_cyclic(const char *pi, const char *rho, size_t degree, bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GTERM_H */
