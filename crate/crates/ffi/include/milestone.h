#ifndef MILESTONE_H
#define MILESTONE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MsStatus {
  MS_STATUS_OK = 0,
  MS_STATUS_NULL_POINTER = 1,
  MS_STATUS_INVALID_UTF8 = 2,
  MS_STATUS_PARSE = 3,
  MS_STATUS_INVALID_INPUT = 4,
  MS_STATUS_BAD_SPEC = 5,
  MS_STATUS_LIMIT_EXCEEDED = 6,
  MS_STATUS_REPLAY = 7,
  MS_STATUS_IO = 8,
  MS_STATUS_PANIC = 9,
} MsStatus;

typedef enum MsEpisodeStatus {
  MS_EPISODE_STATUS_SUCCESS = 0,
  MS_EPISODE_STATUS_FAILURE = 1,
  MS_EPISODE_STATUS_CONTINUE = 2,
  MS_EPISODE_STATUS_BUDGET = 3,
} MsEpisodeStatus;

/**
 * A relational domain definition.
 */
typedef struct MsDomain MsDomain;

/**
 * A relational state.
 */
typedef struct MsState MsState;

/**
 * Outcome of one episode. The return is the exact fraction
 * `ret_numer / ret_denom`.
 */
typedef struct MsEpisode {
  int64_t ret_numer;
  int64_t ret_denom;
  /**
   * Meaningful only when `has_score` is true.
   */
  double normalized_score;
  bool has_score;
  uint64_t plan_length;
  uint64_t nodes_expanded;
  enum MsEpisodeStatus status;
} MsEpisode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *ms_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ms_string_free(char *s);

/**
 * Loads one of the built-in domains: `blocks`, `bins` or `drawers`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum MsStatus ms_domain_builtin(const char *name, struct MsDomain **out);

/**
 * Parses a domain definition.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum MsStatus ms_domain_parse(const char *src, struct MsDomain **out);

/**
 * # Safety
 * `d` must come from this library and not have been freed. Null is ignored.
 */
void ms_domain_free(struct MsDomain *d);

/**
 * Parses a state in the `(state (constants ...) (facts ...))` format.
 *
 * # Safety
 * `src` must be a NUL-terminated string; `out` must be writable.
 */
enum MsStatus ms_state_parse(const char *src, struct MsState **out);

/**
 * # Safety
 * `s` must come from this library and not have been freed. Null is ignored.
 */
void ms_state_free(struct MsState *s);

/**
 * Prints a state in the format read by [`ms_state_parse`].
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum MsStatus ms_state_print(const struct MsState *s, char **out);

/**
 * Mutations of `state` satisfying the domain's maximal-reward condition,
 * one per line.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum MsStatus ms_milestone_mutations(const struct MsDomain *d, const struct MsState *s, char **out);

/**
 * Counts reachable states and dead ends from `s`.
 *
 * # Safety
 * Handles must be live; outputs must be writable.
 */
enum MsStatus ms_oracle_counts(const struct MsDomain *d,
                               const struct MsState *s,
                               uint64_t state_cap,
                               uint64_t *out_states,
                               uint64_t *out_dead_ends);

/**
 * Plans with the bilevel planner and returns the actions, one per line.
 *
 * # Safety
 * Handles must be live; outputs must be writable.
 */
enum MsStatus ms_introspector_plan(const struct MsDomain *d,
                                   const struct MsState *s,
                                   uint64_t horizon,
                                   uint64_t node_cap,
                                   char **out_actions,
                                   enum MsEpisodeStatus *out_status);

/**
 * Runs one episode. `domain` is `grid`, `blocks`, `drawers:N` or `bins:N`;
 * `planner` is e.g. `greedy`, `beam:8` or `introspector`. A `node_cap` of
 * zero selects the default cap.
 *
 * # Safety
 * Strings must be NUL-terminated; `out` must be writable.
 */
enum MsStatus ms_run_episode(const char *domain,
                             uint64_t size,
                             const char *planner,
                             uint64_t seed,
                             uint64_t node_cap,
                             struct MsEpisode *out);

/**
 * Runs the golden checks; `out_report` receives the JSON report.
 *
 * # Safety
 * Outputs must be writable.
 */
enum MsStatus ms_verify_goldens(bool *out_passed, char **out_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MILESTONE_H */
