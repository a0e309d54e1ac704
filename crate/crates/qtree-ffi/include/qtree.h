#ifndef QTREE_H
#define QTREE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum QtreeStatus {
  QTREE_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  QTREE_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  QTREE_STATUS_INVALID_UTF8 = 2,
  /**
   * A term, element or expression failed to parse.
   */
  QTREE_STATUS_PARSE = 3,
  /**
   * The model rejected the operation.
   */
  QTREE_STATUS_MODEL = 4,
  /**
   * The game is over or the request does not fit its state.
   */
  QTREE_STATUS_STATE = 5,
  /**
   * A transcript was malformed.
   */
  QTREE_STATUS_SCHEMA = 6,
  /**
   * An out-of-range argument, such as an unknown side.
   */
  QTREE_STATUS_INVALID_ARGUMENT = 7,
  /**
   * A value does not fit the requested C type.
   */
  QTREE_STATUS_OVERFLOW = 8,
  /**
   * An internal panic was caught at the boundary.
   */
  QTREE_STATUS_PANIC = 9,
} QtreeStatus;

/**
 * Left or right structure, passed as `uint32_t`.
 */
typedef enum QtreeSide {
  QTREE_SIDE_LEFT = 0,
  QTREE_SIDE_RIGHT = 1,
} QtreeSide;

/**
 * Opaque game in progress.
 */
typedef struct QtreeGame QtreeGame;

/**
 * Opaque tree term.
 */
typedef struct QtreeTerm QtreeTerm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call on the same thread.
 */
const char *qtree_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void qtree_string_free(char *s);

/**
 * Parses a term in the `d(n,m)`, `p(l,r)`, `r(m,b)` grammar.
 *
 * # Safety
 * `input` must be a NUL-terminated string and `result` writable.
 */
enum QtreeStatus qtree_term_parse(const char *input, struct QtreeTerm **result);

/**
 * Releases a term. Null is ignored.
 *
 * # Safety
 * `term` must come from this library and not have been freed.
 */
void qtree_term_free(struct QtreeTerm *term);

/**
 * Writes the normal form of a term as a new string.
 *
 * # Safety
 * `term` must be a live handle and `result` writable.
 */
enum QtreeStatus qtree_term_to_string(const struct QtreeTerm *term, char **result);

/**
 * The level of the rightmost leaf.
 *
 * # Safety
 * `term` must be a live handle and `result` writable.
 */
enum QtreeStatus qtree_term_chi(const struct QtreeTerm *term, int64_t *result);

/**
 * `S^k(term)` for any `k`, as a new handle.
 *
 * # Safety
 * `term` must be a live handle and `result` writable.
 */
enum QtreeStatus qtree_term_shift(const struct QtreeTerm *term,
                                  int64_t k,
                                  struct QtreeTerm **result);

/**
 * The pair `<left, right>` in normal form, as a new handle.
 *
 * # Safety
 * Both terms must be live handles and `result` writable.
 */
enum QtreeStatus qtree_term_pair(const struct QtreeTerm *left,
                                 const struct QtreeTerm *right,
                                 struct QtreeTerm **result);

/**
 * Whether two terms are equal in the model.
 *
 * # Safety
 * Both terms must be live handles and `result` writable.
 */
enum QtreeStatus qtree_term_equal(const struct QtreeTerm *a,
                                  const struct QtreeTerm *b,
                                  bool *result);

/**
 * The subterm closure of `count` terms to `depth`, or the full closure
 * when `depth` is negative, printed with R-spines kept symbolic.
 *
 * # Safety
 * `terms` must point to `count` NUL-terminated strings and `result` be
 * writable.
 */
enum QtreeStatus qtree_closure(const char *const *terms,
                               size_t count,
                               int64_t depth,
                               char **result);

/**
 * `rho_n(k)` in decimal, or symbolically when it is too large to print.
 *
 * # Safety
 * `result` must be writable.
 */
enum QtreeStatus qtree_rho(uint32_t n, uint32_t k, char **result);

/**
 * Starts an `n`-round game with anchor `w`.
 *
 * # Safety
 * `w` must be a NUL-terminated string and `result` writable.
 */
enum QtreeStatus qtree_game_new(uint32_t n, const char *w, struct QtreeGame **result);

/**
 * Releases a game. Null is ignored.
 *
 * # Safety
 * `game` must come from this library and not have been freed.
 */
void qtree_game_free(struct QtreeGame *game);

/**
 * Plays a move given as an expression over `w`, `a0` and `b0` and writes
 * the reply. `side` is a [`QtreeSide`] value.
 *
 * # Safety
 * `game` must be a live handle, `element` a NUL-terminated string and
 * `reply` writable.
 */
enum QtreeStatus qtree_game_move(struct QtreeGame *game,
                                 uint32_t side,
                                 const char *element,
                                 char **reply);

/**
 * Whether all rounds have been played.
 *
 * # Safety
 * `game` must be a live handle and `result` writable.
 */
enum QtreeStatus qtree_game_is_finished(const struct QtreeGame *game, bool *result);

/**
 * The transcript JSON, identical to the command line's.
 *
 * # Safety
 * `game` must be a live handle and `result` writable.
 */
enum QtreeStatus qtree_game_transcript(const struct QtreeGame *game, char **result);

/**
 * Re-checks a transcript; `matching` is set when the verdict and every
 * reply are reproduced.
 *
 * # Safety
 * `transcript` must be a NUL-terminated string and `matching` writable.
 */
enum QtreeStatus qtree_replay(const char *transcript, bool *matching);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QTREE_H */
