/* C interface to the wplconn exact-arithmetic library. */

#ifndef WPLCONN_H
#define WPLCONN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define WPL_OK 0

#define WPL_ERR_DOMAIN 1

#define WPL_ERR_PARSE 2

#define WPL_ERR_NULL 3

/**
 * Opaque sheaf handle.
 */
typedef struct WplSheaf WplSheaf;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * # Safety
 * `s` must be null or a pointer previously returned by this library and not
 * yet freed.
 */
void wpl_string_free(char *s);

/**
 * Library version as a static string; do not free.
 */
const char *wpl_version(void);

/**
 * Runs a named command on a JSON input, exactly like the command line.
 * `output` receives the result JSON (or diagnostics on failure). `seed`,
 * `count` and `retries` feed the seeded commands; pass zeros for defaults.
 *
 * # Safety
 * `command` and `input_json` must be null-terminated strings (the input may
 * be null for `selftest`); `output`, if non-null, receives an owned string.
 */
int32_t wpl_eval(const char *command,
                 const char *input_json,
                 uint64_t seed,
                 uintptr_t count,
                 uintptr_t retries,
                 char **output);

/**
 * Parses a sheaf from JSON into an opaque handle, or returns null with an
 * error message in `err`.
 *
 * # Safety
 * `json` must be a null-terminated string; `err`, if non-null, receives an
 * owned string on failure.
 */
struct WplSheaf *wpl_sheaf_parse(const char *json, char **err);

/**
 * # Safety
 * `handle` must be null or a pointer from this library, not yet freed.
 */
void wpl_sheaf_free(struct WplSheaf *handle);

/**
 * Rank of the sheaf behind the handle, or -1 for a null handle.
 *
 * # Safety
 * `handle` must be null or a valid handle.
 */
int64_t wpl_sheaf_rank(const struct WplSheaf *handle);

/**
 * Serializes the sheaf behind the handle.
 *
 * # Safety
 * As [`wpl_sheaf_rank`]; `output` receives an owned string.
 */
int32_t wpl_sheaf_to_json(const struct WplSheaf *handle, char **output);

/**
 * Full validity check; `report` receives `{ok, failures}`.
 *
 * # Safety
 * As [`wpl_sheaf_rank`]; `report` receives an owned string.
 */
int32_t wpl_sheaf_check(const struct WplSheaf *handle, char **report);

/**
 * Flags at the marked points as JSON.
 *
 * # Safety
 * As [`wpl_sheaf_rank`]; `output` receives an owned string.
 */
int32_t wpl_sheaf_flags(const struct WplSheaf *handle, char **output);

/**
 * Shift by the integer vector `r` (length `r_len`), returning a new handle
 * or null with an error in `err`.
 *
 * # Safety
 * `handle` as above; `r` must point to `r_len` readable values.
 */
struct WplSheaf *wpl_sheaf_shift(const struct WplSheaf *handle,
                                 const int64_t *r,
                                 uintptr_t r_len,
                                 char **err);

/**
 * Omega twist, returning a new handle or null with an error in `err`.
 *
 * # Safety
 * `handle` as above.
 */
struct WplSheaf *wpl_sheaf_twist_omega(const struct WplSheaf *handle, char **err);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WPLCONN_H */
