#ifndef OCTACOVER_H
#define OCTACOVER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define OC_OK 0

#define OC_ERR_NULL 1

#define OC_ERR_UTF8 2

#define OC_ERR_PARSE 3

#define OC_ERR_DEGENERATE 4

#define OC_ERR_NOT_COVERING 5

#define OC_ERR_INVALID 6

#define OC_ERR_GEOMETRY 7

#define OC_ERR_PANIC 99

/**
 * A convex polytope with rational vertices.
 */
typedef struct OcPolytope OcPolytope;

/**
 * A set of distinct translation vectors for the octahedron |x|+|y|+|z| ≤ 2.
 */
typedef struct OcTranslates OcTranslates;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *oc_last_error(void);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void oc_string_free(char *s);

/**
 * The octahedron C₃ = {|x|+|y|+|z| ≤ 2}.
 *
 * # Safety
 * `out` must be valid for writing a pointer.
 */
int32_t oc_octahedron(struct OcPolytope **out);

/**
 * The parallelepiped P = conv{±8e₁, ±8e₂, ±8e₃, ±(8,8,8)}.
 *
 * # Safety
 * `out` must be valid for writing a pointer.
 */
int32_t oc_parallelohedron(struct OcPolytope **out);

/**
 * Hull of `{"vertices": [[x,y,z], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
int32_t oc_polytope_from_json(const char *json, struct OcPolytope **out);

/**
 * # Safety
 * `p` must come from this library, or be null; it is invalid afterwards.
 */
void oc_polytope_free(struct OcPolytope *p);

/**
 * Exact volume as a `"p/q"` string.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
int32_t oc_polytope_volume(const struct OcPolytope *p, char **out);

/**
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
int32_t oc_polytope_vertex_count(const struct OcPolytope *p, size_t *out);

/**
 * Parse `{"translates": [[x,y,z], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
int32_t oc_translates_from_json(const char *json, struct OcTranslates **out);

/**
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
int32_t oc_translates_to_json(const struct OcTranslates *x, char **out);

/**
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
int32_t oc_translates_len(const struct OcTranslates *x, size_t *out);

/**
 * # Safety
 * `x` must come from this library, or be null; it is invalid afterwards.
 */
void oc_translates_free(struct OcTranslates *x);

/**
 * vol((C₃+xi) ∩ (C₃+xj)) for points written `"x,y,z"`.
 *
 * # Safety
 * `xi`, `xj` must be NUL-terminated strings; `out` must be writable.
 */
int32_t oc_pair_volume(const char *xi, const char *xj, char **out);

/**
 * Σ vol((C₃+x) ∩ region) / vol(region), exact, plus its float value.
 *
 * # Safety
 * Handles must be live; `out` and `out_f64` must be writable
 * (`out_f64` may be null).
 */
int32_t oc_density(const struct OcTranslates *x,
                   const struct OcPolytope *region,
                   char **out,
                   double *out_f64);

/**
 * Writes 1 to `out` when the translates provably cover `region` at grid
 * step `h` (a rational string), 0 otherwise.
 *
 * # Safety
 * Handles must be live; `h` a NUL-terminated string; `out` writable.
 */
int32_t oc_certify_covering(const struct OcTranslates *x,
                            const struct OcPolytope *region,
                            const char *h,
                            int32_t *out);

/**
 * Full density report for a covering of P as JSON. A non-covering still
 * yields a report with `bound_satisfied` false.
 *
 * # Safety
 * `x` must be live; `h` a NUL-terminated string; `out` writable.
 */
int32_t oc_theorem_report(const struct OcTranslates *x, const char *h, char **out);

/**
 * Anneal from the 9/8 lattice with default parameters and write the best
 * covering found.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t oc_search(size_t iterations, uint64_t seed, struct OcTranslates **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OCTACOVER_H */
