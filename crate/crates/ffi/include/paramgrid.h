#ifndef PARAMGRID_H
#define PARAMGRID_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. Values 1 to 5 match the command-line exit codes.
typedef enum PgStatus {
  PG_STATUS_OK = 0,
  PG_STATUS_FAILURE = 1,
  PG_STATUS_SCHEMA = 2,
  PG_STATUS_EPSILON_OUT_OF_RANGE = 3,
  PG_STATUS_GRID_TOO_LARGE = 4,
  PG_STATUS_DOMAIN_VIOLATION = 5,
  PG_STATUS_NULL_ARGUMENT = 7,
  PG_STATUS_INVALID_UTF8 = 8,
  PG_STATUS_PANIC = 9,
} PgStatus;

// A parsed problem instance.
typedef struct PgInstance PgInstance;

// A computed or loaded approximation set.
typedef struct PgSet PgSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or null after a success.
// The pointer stays valid until the next call on this thread.
const char *pg_last_error(void);

// # Safety
// `s` must be null or a string returned by this library.
void pg_string_free(char *s);

// Parses an instance from its JSON text.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum PgStatus pg_instance_parse(const char *json, struct PgInstance **out);

// # Safety
// `inst` must be null or a handle from [`pg_instance_parse`], freed once.
void pg_instance_free(struct PgInstance *inst);

// Number of parameters `K` of an instance.
//
// # Safety
// `inst` must be a live instance handle.
enum PgStatus pg_instance_k(const struct PgInstance *inst, size_t *out);

// Builds an approximation set with the instance's built-in solver, or with
// the knapsack profit-scaling family when `fptas` is non-zero.
// `threads` of 0 means one thread; `grid_cap` of 0 keeps the default cap.
//
// # Safety
// `inst` must be a live handle, `epsilon` a NUL-terminated string, `out` writable.
enum PgStatus pg_approximate(const struct PgInstance *inst,
                             const char *epsilon,
                             size_t threads,
                             uint64_t grid_cap,
                             int32_t fptas,
                             struct PgSet **out);

// # Safety
// `set` must be null or a set handle, freed once.
void pg_set_free(struct PgSet *set);

// Loads a set from the JSON written by [`pg_set_to_json`] or the CLI.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum PgStatus pg_set_from_json(const char *json, struct PgSet **out);

// # Safety
// `set` must be a live handle and `out` writable.
enum PgStatus pg_set_to_json(const struct PgSet *set, char **out);

// Number of distinct stored solutions.
//
// # Safety
// `set` must be a live handle and `out` writable.
enum PgStatus pg_set_solution_count(const struct PgSet *set, size_t *out);

// Number of grid points, which equals the solver calls made.
//
// # Safety
// `set` must be a live handle and `out` writable.
enum PgStatus pg_set_grid_size(const struct PgSet *set, uint64_t *out);

// The approximation factor the set certifies, as a rational string.
//
// # Safety
// `set` must be a live handle and `out` writable.
enum PgStatus pg_set_guarantee(const struct PgSet *set, char **out);

// Looks up the stored solution for the parameter vector `lambda`
// (`len` rational strings). Writes the solution's position in the set and
// its objective value at `lambda`; either out-pointer may be null.
//
// # Safety
// Handles must be live and `lambda` must point to `len` NUL-terminated strings.
enum PgStatus pg_query(const struct PgSet *set,
                       const struct PgInstance *inst,
                       const char *const *lambda,
                       size_t len,
                       size_t *out_solution,
                       char **out_value);

// JSON of the stored solution at position `index`.
//
// # Safety
// `set` must be a live handle and `out` writable.
enum PgStatus pg_set_solution_json(const struct PgSet *set, size_t index, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PARAMGRID_H */
