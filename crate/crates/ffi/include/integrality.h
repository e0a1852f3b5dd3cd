#ifndef INTEGRALITY_H
#define INTEGRALITY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define INTEGRALITY_OK 0

/**
 * A mathematical check failed (identity mismatch, inexact division,
 * non-power-of-2 denominator, critical report).
 */
#define INTEGRALITY_ERR_MISMATCH 1

/**
 * Malformed spec text, tuple or identity name.
 */
#define INTEGRALITY_ERR_PARSE 2

/**
 * Argument outside the accepted domain.
 */
#define INTEGRALITY_ERR_INVALID 4

/**
 * A required pointer was null.
 */
#define INTEGRALITY_ERR_NULL 5

/**
 * Input string is not UTF-8.
 */
#define INTEGRALITY_ERR_UTF8 6

/**
 * Internal panic caught at the boundary.
 */
#define INTEGRALITY_ERR_PANIC 7

/**
 * A memoized bracket table.
 */
typedef struct IntegralityBrackets IntegralityBrackets;

/**
 * A parsed recurrence.
 */
typedef struct IntegralitySpec IntegralitySpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *integrality_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void integrality_string_free(char *s);

/**
 * Parses recurrence text into a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
int32_t integrality_spec_parse(const char *text, struct IntegralitySpec **out);

/**
 * # Safety
 * `spec` must come from [`integrality_spec_parse`] and not have been freed.
 */
void integrality_spec_free(struct IntegralitySpec *spec);

/**
 * Canonical text of the spec.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
int32_t integrality_spec_canonical(const struct IntegralitySpec *spec, char **out);

/**
 * Terms `0..=n` as a JSON array of polynomial strings.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
int32_t integrality_spec_run_json(const struct IntegralitySpec *spec, size_t n, char **out);

/**
 * Integrality report as JSON. Returns [`INTEGRALITY_ERR_MISMATCH`] (with
 * the report still written) when the report is flagged critical.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
int32_t integrality_spec_certify_json(const struct IntegralitySpec *spec, size_t n, char **out);

/**
 * Checks a named identity to the given order. Returns
 * [`INTEGRALITY_ERR_MISMATCH`] if it fails.
 *
 * # Safety
 * `name` must be a NUL-terminated string.
 */
int32_t integrality_verify(const char *name, size_t order);

/**
 * New bracket table for a comma-separated tuple of polynomials in `t`.
 * Non-odd polynomials are rejected unless `permissive` is true.
 *
 * # Safety
 * `tuple` must be a NUL-terminated string; `out` must be writable.
 */
int32_t integrality_brackets_new(const char *tuple,
                                 bool permissive,
                                 struct IntegralityBrackets **out);

/**
 * # Safety
 * `table` must come from [`integrality_brackets_new`] and not have been freed.
 */
void integrality_brackets_free(struct IntegralityBrackets *table);

/**
 * Tuple length `d`.
 *
 * # Safety
 * `table` must be a live handle.
 */
size_t integrality_brackets_dim(const struct IntegralityBrackets *table);

/**
 * Bracket value at `m[0..len]` as polynomial text in `x1..xd`.
 *
 * # Safety
 * `table` must be a live handle not used concurrently; `m` must point to
 * `len` readable values; `out` must be writable.
 */
int32_t integrality_brackets_get(struct IntegralityBrackets *table,
                                 const uint32_t *m,
                                 size_t len,
                                 char **out);

/**
 * Builds the table to level `bound` and writes the certification summary
 * as JSON.
 *
 * # Safety
 * `table` must be a live handle not used concurrently; `out` must be writable.
 */
int32_t integrality_brackets_certify_json(struct IntegralityBrackets *table,
                                          size_t bound,
                                          char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INTEGRALITY_H */
