#ifndef GTS_H
#define GTS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * How rule formulas are provided to a trace certificate.
 */
typedef enum GtsRuleStyle {
  /**
   * One reusable hypothesis per rule.
   */
  GTS_RULE_STYLE_NONLINEAR = 0,
  /**
   * Exactly as many linear instances as the trace applies each rule.
   */
  GTS_RULE_STYLE_LINEAR = 1,
} GtsRuleStyle;

/**
 * Result of every fallible call. The first four agree with the exit codes
 * of the `gts` binary.
 */
typedef enum GtsStatus {
  GTS_STATUS_OK = 0,
  /**
   * The question was answered negatively: not reachable, rejected by
   * the kernel, not enough rule instances.
   */
  GTS_STATUS_NEGATIVE = 1,
  /**
   * Malformed input or an unknown name.
   */
  GTS_STATUS_INPUT = 2,
  /**
   * A state cap was hit before the search finished.
   */
  GTS_STATUS_EXHAUSTED = 3,
  GTS_STATUS_NULL_ARGUMENT = 4,
  GTS_STATUS_INVALID_UTF8 = 5,
  /**
   * A bug in the library; the message carries the panic payload.
   */
  GTS_STATUS_PANIC = 6,
} GtsStatus;

/**
 * A kernel-accepted sequent.
 */
typedef struct GtsCertificate GtsCertificate;

/**
 * A parsed set of declarations.
 */
typedef struct GtsWorkspace GtsWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or an empty string.
 * The pointer stays valid until the next library call on this thread.
 */
const char *gts_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void gts_string_free(char *s);

/**
 * Parses declarations (node and edge types, graphs, rules, formulas,
 * sequents) from `source`.
 *
 * # Safety
 * `source` must be a NUL-terminated string; `out` must be writable.
 */
enum GtsStatus gts_workspace_parse(const char *source, struct GtsWorkspace **out);

/**
 * # Safety
 * `ws` must be null or a handle from [`gts_workspace_parse`] not yet freed.
 */
void gts_workspace_free(struct GtsWorkspace *ws);

/**
 * Writes the normal form of graph `name` as text to `out`.
 *
 * # Safety
 * Pointers must be valid; `*out` must be released with [`gts_string_free`].
 */
enum GtsStatus gts_workspace_normalize(const struct GtsWorkspace *ws, const char *name, char **out);

/**
 * Sets `*out` to whether graphs `a` and `b` are structurally congruent.
 *
 * # Safety
 * Pointers must be valid.
 */
enum GtsStatus gts_workspace_congruent(const struct GtsWorkspace *ws,
                                       const char *a,
                                       const char *b,
                                       bool *out);

/**
 * Breadth-first search from the initial graph for a state congruent to
 * graph `target`. On success `*steps` is the length of a shortest trace;
 * `GTS_NEGATIVE` means no such state within `max_steps`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum GtsStatus gts_workspace_reach(const struct GtsWorkspace *ws,
                                   const char *target,
                                   uint32_t max_steps,
                                   size_t *steps);

/**
 * Finds a shortest trace to `target` and certifies it.
 *
 * # Safety
 * Pointers must be valid; `*out` must be released with
 * [`gts_certificate_free`].
 */
enum GtsStatus gts_workspace_certify_trace(const struct GtsWorkspace *ws,
                                           const char *target,
                                           uint32_t max_steps,
                                           enum GtsRuleStyle style,
                                           struct GtsCertificate **out);

/**
 * Type-checks the declared sequent `name`. `GTS_NEGATIVE` means the kernel
 * rejected it; `*class` (if not null) then receives the diagnostic class,
 * for instance `linear_reuse`.
 *
 * # Safety
 * Pointers must be valid; `class` may be null.
 */
enum GtsStatus gts_workspace_check_sequent(const struct GtsWorkspace *ws,
                                           const char *name,
                                           char **class_);

/**
 * Reads a certificate from its JSON form and re-checks it. A rejected
 * certificate gives `GTS_NEGATIVE` and no handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum GtsStatus gts_certificate_from_json(const char *json, struct GtsCertificate **out);

/**
 * The certificate as JSON: `gamma`, `delta`, `term`, `type` and, for
 * traces, `trace`.
 *
 * # Safety
 * Pointers must be valid; `*out` must be released with [`gts_string_free`].
 */
enum GtsStatus gts_certificate_to_json(const struct GtsCertificate *cert, char **out);

/**
 * # Safety
 * `cert` must be null or a live certificate handle.
 */
void gts_certificate_free(struct GtsCertificate *cert);

/**
 * Runs the `gts` command line with `argv[0..argc]` (program name first)
 * and hands back its exit code and output streams.
 *
 * # Safety
 * `argv` must hold `argc` NUL-terminated strings; `stdout_out` and
 * `stderr_out` may be null when the caller does not want them.
 */
enum GtsStatus gts_run(int argc,
                       const char *const *argv,
                       int *exit_code,
                       char **stdout_out,
                       char **stderr_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GTS_H */
