#ifndef IDLEARN_H
#define IDLEARN_H

/* Generated by cbindgen from the idlearn-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call. The nonzero values match the exit
 * codes of the command line tool where they overlap.
 */
typedef enum IdlStatus {
  IDL_STATUS_OK = 0,
  IDL_STATUS_NOT_IDENTIFIABLE = 2,
  IDL_STATUS_POSITIVITY_VIOLATION = 3,
  IDL_STATUS_INVALID_INPUT = 4,
  IDL_STATUS_NULL_POINTER = 5,
  IDL_STATUS_PANIC = 6,
} IdlStatus;

/**
 * An ADMG.
 */
typedef struct IdlAdmg IdlAdmg;

/**
 * A learned interventional distribution.
 */
typedef struct IdlLearned IdlLearned;

/**
 * A causal Bayes net with hidden variables.
 */
typedef struct IdlNet IdlNet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *idl_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void idl_string_free(char *s);

/**
 * Parses an ADMG document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum IdlStatus idl_admg_from_json(const char *json, struct IdlAdmg **out);

/**
 * # Safety
 * `g` must come from `idl_admg_from_json` and not be freed twice.
 */
void idl_admg_free(struct IdlAdmg *g);

/**
 * Compiles a query. On success `out_json` receives
 * `{"identifiable": true, "estimand": {...}, "trace": [...]}`; when the
 * effect is not identifiable the status is `NOT_IDENTIFIABLE` and
 * `out_json` receives the hedge report.
 *
 * # Safety
 * Pointers must be valid as described for the other functions.
 */
enum IdlStatus idl_identify(const struct IdlAdmg *g, const char *query_json, char **out_json);

/**
 * Parses a causal Bayes net document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum IdlStatus idl_net_from_json(const char *json, struct IdlNet **out);

/**
 * # Safety
 * `net` must come from `idl_net_from_json` and not be freed twice.
 */
void idl_net_free(struct IdlNet *net);

/**
 * `m` observational samples as CSV with a header of observable names.
 *
 * # Safety
 * `net` must be a live handle; `out_csv` must be writable.
 */
enum IdlStatus idl_net_simulate(const struct IdlNet *net, uint64_t seed, size_t m, char **out_csv);

/**
 * Exact `P_x(y)` as `{"targets": [...], "probs": [...]}`, cells ordered
 * with the last target varying fastest.
 *
 * # Safety
 * Pointers must be valid as described for the other functions.
 */
enum IdlStatus idl_net_exact_interventional(const struct IdlNet *net,
                                            const char *query_json,
                                            char **out_json);

/**
 * Learns `P_x(V ∖ X)` from CSV samples. The query must leave `targets`
 * unset or list every non-intervened variable.
 *
 * # Safety
 * Pointers must be valid as described for the other functions.
 */
enum IdlStatus idl_learn(const struct IdlAdmg *g,
                         const char *samples_csv,
                         const char *query_json,
                         double epsilon,
                         double delta,
                         double alpha,
                         struct IdlLearned **out);

/**
 * Parses a learned-model document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum IdlStatus idl_learned_from_json(const char *json, struct IdlLearned **out);

/**
 * Serializes a learned model.
 *
 * # Safety
 * `li` must be a live handle; `out_json` must be writable.
 */
enum IdlStatus idl_learned_to_json(const struct IdlLearned *li, char **out_json);

/**
 * # Safety
 * `li` must come from this library and not be freed twice.
 */
void idl_learned_free(struct IdlLearned *li);

/**
 * Number of graph variables; `idl_learned_eval` reads that many values.
 *
 * # Safety
 * `li` must be a live handle or null (returns 0).
 */
size_t idl_learned_num_vars(const struct IdlLearned *li);

/**
 * Number of targets; each sample from `idl_learned_sample` has that many
 * values, in variable declaration order.
 *
 * # Safety
 * `li` must be a live handle or null (returns 0).
 */
size_t idl_learned_num_targets(const struct IdlLearned *li);

/**
 * `P̂_x(y)` at `values`, one symbol per graph variable in declaration
 * order. Entries of intervened variables are ignored.
 *
 * # Safety
 * `values` must point to `len` readable entries; `out` must be writable.
 */
enum IdlStatus idl_learned_eval(const struct IdlLearned *li,
                                const uint32_t *values,
                                size_t len,
                                double *out);

/**
 * Draws `m` samples into `out`, row-major, `idl_learned_num_targets`
 * values per sample.
 *
 * # Safety
 * `out` must point to `len` writable entries.
 */
enum IdlStatus idl_learned_sample(const struct IdlLearned *li,
                                  uint64_t seed,
                                  size_t m,
                                  uint32_t *out,
                                  size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IDLEARN_H */
