#ifndef PERMUTON_H
#define PERMUTON_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  PT_STATUS_OK = 0,
  PT_STATUS_NULL_POINTER = 1,
  PT_STATUS_INVALID_ARGUMENT = 2,
  PT_STATUS_INVALID_PERMUTATION = 3,
  PT_STATUS_NOT_SEPARABLE = 4,
  PT_STATUS_BUDGET_EXCEEDED = 5,
  PT_STATUS_PANIC = 6,
} PtStatus;

/**
 * Opaque permutation handle.
 */
typedef struct PtPermutation PtPermutation;

/**
 * Opaque signed Schröder tree handle.
 */
typedef struct PtSignedTree PtSignedTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *pt_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void pt_string_free(char *s);

/**
 * Builds a permutation from `len` values, a rearrangement of `1..=len`.
 *
 * # Safety
 * `values` must point to `len` readable integers and `out` must be writable.
 */
PtStatus pt_perm_new(const uint32_t *values, size_t len, PtPermutation **out);

/**
 * Parses a permutation such as `"2413"` or `"10 2 1 3 4 5 6 7 8 9"`.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` must be writable.
 */
PtStatus pt_perm_parse(const char *text, PtPermutation **out);

/**
 * # Safety
 * `p` must be null or a handle from this library, not yet freed.
 */
void pt_perm_free(PtPermutation *p);

/**
 * Size of the permutation, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t pt_perm_len(const PtPermutation *p);

/**
 * Copies the values into `out`, which must hold at least `pt_perm_len(p)`
 * integers; `cap` is its capacity.
 *
 * # Safety
 * `p` must be a live handle and `out` must have room for `cap` integers.
 */
PtStatus pt_perm_values(const PtPermutation *p, uint32_t *out, size_t cap);

/**
 * Space-separated values of the permutation.
 *
 * # Safety
 * `p` must be a live handle and `out` must be writable.
 */
PtStatus pt_perm_to_string(const PtPermutation *p, char **out);

/**
 * # Safety
 * `p` must be a live handle and `out` must be writable.
 */
PtStatus pt_is_separable(const PtPermutation *p, bool *out);

/**
 * Exact density of `pattern` in `sigma` as a fraction string and a double.
 *
 * # Safety
 * Both handles must be live and both out-parameters writable.
 */
PtStatus pt_occ_exact(const PtPermutation *pattern,
                      const PtPermutation *sigma,
                      char **out_fraction,
                      double *out_value);

/**
 * Decomposition tree of a separable permutation; `PT_STATUS_NOT_SEPARABLE`
 * otherwise.
 *
 * # Safety
 * `p` must be a live handle and `out` must be writable.
 */
PtStatus pt_decompose(const PtPermutation *p, PtSignedTree **out);

/**
 * Parses a signed tree such as `"(+ L (- L L))"`.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` must be writable.
 */
PtStatus pt_tree_parse(const char *text, PtSignedTree **out);

/**
 * # Safety
 * `t` must be a live handle and `out` must be writable.
 */
PtStatus pt_tree_to_string(const PtSignedTree *t, char **out);

/**
 * The permutation of a signed tree.
 *
 * # Safety
 * `t` must be a live handle and `out` must be writable.
 */
PtStatus pt_tree_perm(const PtSignedTree *t, PtPermutation **out);

/**
 * # Safety
 * `t` must be null or a handle from this library, not yet freed.
 */
void pt_tree_free(PtSignedTree *t);

/**
 * Limit expectation of the density of `pattern` in uniform separable
 * permutations.
 *
 * # Safety
 * `pattern` must be a live handle and both out-parameters writable.
 */
PtStatus pt_expectation(const PtPermutation *pattern, char **out_fraction, double *out_value);

/**
 * Joint limit moment of the densities of `count` patterns. Fails with
 * `PT_STATUS_BUDGET_EXCEEDED` when more than `budget` partition pairs would
 * be enumerated.
 *
 * # Safety
 * `patterns` must point to `count` live handles and both out-parameters
 * must be writable.
 */
PtStatus pt_joint_moment(const PtPermutation *const *patterns,
                         size_t count,
                         uint64_t budget,
                         char **out_fraction,
                         double *out_value);

/**
 * Uniform random separable permutation of size `n`, determined by `seed`.
 *
 * # Safety
 * `out` must be writable.
 */
PtStatus pt_sample_separable(size_t n, uint64_t seed, PtPermutation **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERMUTON_H */
