#ifndef ORRKIT_H
#define ORRKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OrrStatus {
  ORR_STATUS_OK = 0,
  ORR_STATUS_NULL_POINTER = 1,
  ORR_STATUS_INVALID_UTF8 = 2,
  ORR_STATUS_PARSE = 3,
  ORR_STATUS_PRECONDITION = 4,
  ORR_STATUS_INVALID = 5,
  ORR_STATUS_PANIC = 6,
} OrrStatus;

/**
 * Opaque automorphism built from a JSON config.
 */
typedef struct OrrAutomorphism OrrAutomorphism;

/**
 * Opaque reduced word in a free group.
 */
typedef struct OrrWord OrrWord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *orr_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void orr_string_free(char *s);

/**
 * `N_k(n)` as a decimal string.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum OrrStatus orr_witt_rank(uint64_t n, uint64_t k, char **out);

/**
 * `D_k(n) = nN_k(n) - N_{k+1}(n)` as a decimal string.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum OrrStatus orr_d_rank(uint64_t n, uint64_t k, char **out);

/**
 * H_3 weight decomposition of `L/L_{≥k}` as `"a⊕b⊕…"` (UTF-8), from the rank formula.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum OrrStatus orr_h3_cell(uint64_t n, uint64_t k, char **out);

/**
 * Koszul homology `H_degree(L/L_{≥k})` computed directly, as JSON.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum OrrStatus orr_homology_json(size_t n, size_t k, size_t degree, char **out);

/**
 * Parse a word such as `"[[x1,x2],x2] x1^-3"` in the free group of rank `n`.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum OrrStatus orr_word_parse(const char *text, size_t n, struct OrrWord **out);

/**
 * # Safety
 * `w` must come from this library and not have been freed.
 */
void orr_word_free(struct OrrWord *w);

/**
 * # Safety
 * `a`, `b` must be live handles and `out` a valid pointer.
 */
enum OrrStatus orr_word_multiply(const struct OrrWord *a,
                                 const struct OrrWord *b,
                                 struct OrrWord **out);

/**
 * Reduced syllable form of the word.
 *
 * # Safety
 * `w` must be a live handle and `out` a valid pointer.
 */
enum OrrStatus orr_word_to_string(const struct OrrWord *w, char **out);

/**
 * Magnus coefficient `μ(I; w)` over Z (`ell = 0`) or Z/ℓ^M.
 *
 * # Safety
 * `w` must be a live handle, `index` must point to `len` values, `out` valid.
 */
enum OrrStatus orr_magnus_coefficient(const struct OrrWord *w,
                                      const size_t *index,
                                      size_t len,
                                      uint64_t ell,
                                      uint32_t m,
                                      char **out);

/**
 * Lower-central depth of `w` seen through truncation `degree`. `exact` is
 * false when the word is trivial up to the truncation and `depth` is only a
 * lower bound.
 *
 * # Safety
 * `w` must be a live handle; `depth` and `exact` valid pointers.
 */
enum OrrStatus orr_lcs_depth(const struct OrrWord *w, size_t degree, size_t *depth, bool *exact);

/**
 * Build an automorphism from a JSON config (`n`, `K`, `ell`, `M`, `chi`, `y`).
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum OrrStatus orr_automorphism_from_json(const char *json, struct OrrAutomorphism **out);

/**
 * # Safety
 * `a` must come from this library and not have been freed.
 */
void orr_automorphism_free(struct OrrAutomorphism *a);

/**
 * Milnor invariant `μ(σ; J)` mod ℓ^M.
 *
 * # Safety
 * `a` must be a live handle, `index` must point to `len` values, `out` valid.
 */
enum OrrStatus orr_automorphism_milnor(const struct OrrAutomorphism *a,
                                       const size_t *index,
                                       size_t len,
                                       char **out);

/**
 * JSON report `depth | milnor | tau | tower | n2`; `k` and `l` of zero mean unset.
 *
 * # Safety
 * `a` must be a live handle, `report` a nul-terminated string, `out` valid.
 */
enum OrrStatus orr_automorphism_report(const struct OrrAutomorphism *a,
                                       const char *report,
                                       size_t k,
                                       size_t l,
                                       char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORRKIT_H */
