#ifndef DEDEKIND_H
#define DEDEKIND_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stdint.h>

typedef enum DkStatus {
  DK_OK = 0,
  DK_ERR_INTERNAL = 1,
  DK_ERR_INVALID = 2,
  DK_ERR_CAPABILITY = 3,
  DK_ERR_CONSISTENCY = 4,
  DK_ERR_PRECONDITION = 5,
  DK_ERR_NULL_POINTER = 6,
  DK_ERR_CHECKPOINT = 7,
  DK_ERR_INTERRUPTED = 8,
} DkStatus;

/*
 An antichain over `{1..n}`.
 */
typedef struct DkAntichain DkAntichain;

/*
 An equation system under construction: `α` plus the `r(r-1)/2`
 right-hand sides, set one at a time.
 */
typedef struct DkSystem DkSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread. The pointer stays
 valid until the next failing call on the same thread. Never null.
 */
const char *dk_last_error_message(void);

/*
 Release a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void dk_string_free(char *s);

/*
 Parse text such as `{12,3}` (sets of digits, `0` for the empty set,
 `{}` for the empty antichain) over `{1..n}`. With `normalize`, sets
 contained in other sets are dropped instead of rejected.

 # Safety
 `text` must be a nul-terminated string; `out` must be writable.
 */
enum DkStatus dk_antichain_parse(const char *text_in,
                                 uint32_t n,
                                 bool normalize,
                                 struct DkAntichain **out);

/*
 `⊥`, the antichain with no sets.

 # Safety
 `out` must be writable.
 */
enum DkStatus dk_antichain_bottom(uint32_t n, struct DkAntichain **out);

/*
 `⊤`, the antichain holding the full set.

 # Safety
 `out` must be writable.
 */
enum DkStatus dk_antichain_top(uint32_t n, struct DkAntichain **out);

/*
 # Safety
 `a` must come from this library and not have been freed. Null is ignored.
 */
void dk_antichain_free(struct DkAntichain *a);

/*
 Base-set size of `a`, or 0 for null.

 # Safety
 `a` must be a live handle or null.
 */
uint32_t dk_antichain_n(const struct DkAntichain *a);

/*
 Text form of `a`; release with [`dk_string_free`].

 # Safety
 `a` must be a live handle; `out` must be writable.
 */
enum DkStatus dk_antichain_to_string(const struct DkAntichain *a, char **out);

/*
 `a ≤ b`: every set of `a` lies inside a set of `b`.

 # Safety
 `a`, `b` must be live handles; `out` must be writable.
 */
enum DkStatus dk_antichain_le(const struct DkAntichain *a, const struct DkAntichain *b, bool *out);

/*
 # Safety
 `a`, `b` must be live handles; `out` must be writable.
 */
enum DkStatus dk_antichain_join(const struct DkAntichain *a,
                                const struct DkAntichain *b,
                                struct DkAntichain **out);

/*
 # Safety
 `a`, `b` must be live handles; `out` must be writable.
 */
enum DkStatus dk_antichain_meet(const struct DkAntichain *a,
                                const struct DkAntichain *b,
                                struct DkAntichain **out);

/*
 # Safety
 `a` must be a live handle; `out` must be writable.
 */
enum DkStatus dk_antichain_dual(const struct DkAntichain *a, struct DkAntichain **out);

/*
 `|[bottom, top]|` as a decimal string; `"0"` when `bottom ≰ top`.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum DkStatus dk_interval_size(const struct DkAntichain *bottom,
                               const struct DkAntichain *top,
                               char **out);

/*
 Number of connected components of `β − α`; requires `α ≤ β`.

 # Safety
 Handles must be live; `out` must be writable.
 */
enum DkStatus dk_connector_number(const struct DkAntichain *alpha,
                                  const struct DkAntichain *beta,
                                  uint32_t *out);

/*
 Start a system in `r` variables with meet `alpha` (copied).

 # Safety
 `alpha` must be a live handle; `out` must be writable.
 */
enum DkStatus dk_system_new(const struct DkAntichain *alpha, uint32_t r, struct DkSystem **out);

/*
 Set the right-hand side of `χ_i ∨ χ_j` (1-based, `i ≠ j`; `beta` is
 copied).

 # Safety
 `sys` and `beta` must be live handles.
 */
enum DkStatus dk_system_set_beta(struct DkSystem *sys,
                                 uint32_t i,
                                 uint32_t j,
                                 const struct DkAntichain *beta);

/*
 Number of solutions, as a decimal string. Every pair must have been set.

 # Safety
 `sys` must be a live handle; `out` must be writable.
 */
enum DkStatus dk_system_count(const struct DkSystem *sys, char **out);

/*
 # Safety
 `sys` must come from this library and not have been freed. Null is ignored.
 */
void dk_system_free(struct DkSystem *sys);

/*
 Run a computation (`bruteforce`, `nplus2`, `nplus3`, `nplus4`,
 `wiedemann`) and return its JSON report. `workers = 0` uses every core.

 # Safety
 `method` must be a nul-terminated string; `out` must be writable.
 */
enum DkStatus dk_compute(const char *method,
                         uint32_t n,
                         uint32_t workers,
                         bool reduce_symmetry,
                         char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEDEKIND_H */
