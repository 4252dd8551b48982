/* C interface for the chr rule runtime. */

#ifndef CHR_H
#define CHR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum ChrStatus {
  /**
   * Success.
   */
  CHR_OK = 0,
  /**
   * A required pointer was null or otherwise unusable.
   */
  CHR_INVALID_ARGUMENT = 1,
  /**
   * Program or query text did not parse or compile.
   */
  CHR_PARSE_ERROR = 2,
  /**
   * The run exhausted its step budget.
   */
  CHR_STEP_BUDGET = 3,
  /**
   * A soundness check failed.
   */
  CHR_UNSOUND = 4,
  /**
   * A guard or body evaluation failed at runtime.
   */
  CHR_EVAL_ERROR = 5,
} ChrStatus;

/**
 * An opaque, immutable rule program.
 */
typedef struct ChrProgram ChrProgram;

/**
 * An opaque finished run: final state plus trace.
 */
typedef struct ChrRun ChrRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread, or null. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *chr_last_error_message(void);

/**
 * Compiles a program from source text in the rule dialect.
 *
 * # Safety
 * `source` must point to a NUL-terminated string and `out_program`
 * to a writable pointer slot.
 */
enum ChrStatus chr_program_from_source(const char *source, struct ChrProgram **out_program);

/**
 * Looks up a built-in example program ("gcd" or "trans").
 *
 * # Safety
 * `name` must point to a NUL-terminated string and `out_program` to a
 * writable pointer slot.
 */
enum ChrStatus chr_program_builtin(const char *name, struct ChrProgram **out_program);

/**
 * Releases a program handle; null is tolerated.
 *
 * # Safety
 * `program` must be null or a pointer from this library, not yet freed.
 */
void chr_program_free(struct ChrProgram *program);

/**
 * Runs a program on a comma-separated query. `max_steps` of 0 selects
 * the default budget.
 *
 * # Safety
 * `program` must be a live program handle, `query` a NUL-terminated
 * string and `out_run` a writable pointer slot.
 */
enum ChrStatus chr_run(const struct ChrProgram *program,
                       const char *query,
                       uint64_t max_steps,
                       struct ChrRun **out_run);

/**
 * Like [`chr_run`] but validates every root-level step against the
 * multiset-rewriting oracle; an unsound step aborts the run.
 *
 * # Safety
 * Same contract as [`chr_run`].
 */
enum ChrStatus chr_run_checked(const struct ChrProgram *program,
                               const char *query,
                               uint64_t max_steps,
                               struct ChrRun **out_run);

/**
 * Final store as a sorted multiset, e.g. `{3}`; caller frees.
 *
 * # Safety
 * `run` must be a live run handle.
 */
char *chr_run_store_text(const struct ChrRun *run);

/**
 * Trace as newline-separated JSON events; caller frees.
 *
 * # Safety
 * `run` must be a live run handle.
 */
char *chr_run_trace_jsonl(const struct ChrRun *run);

/**
 * Number of values left on the query (0 after a completed run).
 *
 * # Safety
 * `run` must be a live run handle.
 */
uint64_t chr_run_query_len(const struct ChrRun *run);

/**
 * Number of values in the final store.
 *
 * # Safety
 * `run` must be a live run handle.
 */
uint64_t chr_run_store_len(const struct ChrRun *run);

/**
 * Root-level steps the run took.
 *
 * # Safety
 * `run` must be a live run handle.
 */
uint64_t chr_run_steps(const struct ChrRun *run);

/**
 * Releases a run handle; null is tolerated.
 *
 * # Safety
 * `run` must be null or a pointer from this library, not yet freed.
 */
void chr_run_free(struct ChrRun *run);

/**
 * Releases a string returned by this library; null is tolerated.
 *
 * # Safety
 * `text` must be null or a string pointer from this library, not yet
 * freed.
 */
void chr_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHR_H */
