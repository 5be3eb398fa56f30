#ifndef HYPERRANK_H
#define HYPERRANK_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum HrStatus {
  HR_STATUS_OK = 0,
  HR_STATUS_NULL_POINTER = 1,
  HR_STATUS_INVALID_ARGUMENT = 2,
  HR_STATUS_TOO_LARGE = 3,
  HR_STATUS_PARSE = 4,
  HR_STATUS_BUFFER_TOO_SMALL = 5,
  HR_STATUS_INTERNAL = 6,
} HrStatus;

/**
 * A k-uniform hypergraph with distinct edges.
 */
typedef struct HrHypergraph HrHypergraph;

/**
 * Incremental GF(2) rank of columns offered one at a time.
 */
typedef struct HrRankEngine HrRankEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. The pointer stays valid
 * until the next failing call on the same thread.
 */
const char *hr_last_error_message(void);

/**
 * Static description of a status code.
 */
const char *hr_status_string(enum HrStatus status);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void hr_string_free(char *s);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum HrStatus hr_rank_engine_new(size_t n, struct HrRankEngine **out);

/**
 * # Safety
 * `engine` must come from [`hr_rank_engine_new`] and not have been freed.
 */
void hr_rank_engine_free(struct HrRankEngine *engine);

/**
 * Offers the column with ones at `indices[0..k]` (strictly increasing).
 * `*independent` is set to whether the rank grew.
 *
 * # Safety
 * `engine` must be live, `indices` must point to `k` readable values and
 * `independent` must be valid.
 */
enum HrStatus hr_rank_engine_offer(struct HrRankEngine *engine,
                                   const uint32_t *indices,
                                   size_t k,
                                   bool *independent);

/**
 * # Safety
 * `engine` must be live.
 */
size_t hr_rank_engine_rank(const struct HrRankEngine *engine);

/**
 * Samples `m` distinct uniform `k`-subsets of `0..n` from stream
 * `(seed, stream)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HrStatus hr_hypergraph_sample(size_t n,
                                   size_t k,
                                   size_t m,
                                   uint64_t seed,
                                   uint64_t stream,
                                   struct HrHypergraph **out);

/**
 * Parses the text matrix format.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum HrStatus hr_hypergraph_parse(const char *text, struct HrHypergraph **out);

/**
 * # Safety
 * `h` must come from this library and not have been freed.
 */
void hr_hypergraph_free(struct HrHypergraph *h);

/**
 * Dimensions `(n, k, m)`.
 *
 * # Safety
 * `h` must be live; the out-pointers must be valid.
 */
enum HrStatus hr_hypergraph_shape(const struct HrHypergraph *h, size_t *n, size_t *k, size_t *m);

/**
 * Copies edge `i` into `buf`, which must hold at least `k` values.
 *
 * # Safety
 * `h` must be live and `buf` must point to `cap` writable values.
 */
enum HrStatus hr_hypergraph_edge(const struct HrHypergraph *h, size_t i, uint32_t *buf, size_t cap);

/**
 * GF(2) rank of the incidence matrix.
 *
 * # Safety
 * `h` must be live and `rank` valid.
 */
enum HrStatus hr_hypergraph_rank(const struct HrHypergraph *h, size_t *rank);

/**
 * Peels to the 2-core: number of peeled edges and size of the core.
 *
 * # Safety
 * `h` must be live; the out-pointers must be valid.
 */
enum HrStatus hr_hypergraph_peel(const struct HrHypergraph *h,
                                 size_t *m1,
                                 size_t *core_vertices,
                                 size_t *core_edges);

/**
 * Serializes to the text matrix format; free with [`hr_string_free`].
 *
 * # Safety
 * `h` must be live and `out` valid.
 */
enum HrStatus hr_hypergraph_to_text(const struct HrHypergraph *h, char **out);

/**
 * Largest root in (0, 1] of `x = (1 - e^{-cx})^{k-1}`, 0 if none.
 *
 * # Safety
 * `x` must be valid.
 */
enum HrStatus hr_largest_fixed_point(size_t k, double c, double tol, double *x);

/**
 * # Safety
 * `out` must be valid.
 */
enum HrStatus hr_hat_c(size_t k, double tol, double *out);

/**
 * # Safety
 * `out` must be valid.
 */
enum HrStatus hr_c_star(size_t k, double *out);

/**
 * Predicted 2-core vertex and edge fractions.
 *
 * # Safety
 * The out-pointers must be valid.
 */
enum HrStatus hr_core_fractions(size_t k, double c, double *core_v, double *core_e);

/**
 * Predicted rank/n at density `c`.
 *
 * # Safety
 * `out` must be valid.
 */
enum HrStatus hr_rank_fraction(size_t k, double c, double *out);

/**
 * Minimum-weight-basis limit and its error bound.
 *
 * # Safety
 * The out-pointers must be valid.
 */
enum HrStatus hr_mwb_limit(size_t k, double quad_tol, double *value, double *quad_error);

/**
 * `exp(-exp(-c))`.
 */
double hr_full_rank_probability(double c);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERRANK_H */
