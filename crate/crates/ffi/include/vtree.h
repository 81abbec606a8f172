#ifndef VTREE_H
#define VTREE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VtreeCode {
  VTREE_CODE_CI = 0,
  VTREE_CODE_CII = 1,
  VTREE_CODE_CU = 2,
  VTREE_CODE_CV = 3,
} VtreeCode;

typedef enum VtreeEntropyCode {
  VTREE_ENTROPY_CODE_LEVY = 0,
  VTREE_ENTROPY_CODE_GAUSS_KUZMIN = 1,
  VTREE_ENTROPY_CODE_CI_CII = 2,
  VTREE_ENTROPY_CODE_STERN_BROCOT = 3,
} VtreeEntropyCode;

/**
 * Result of every fallible call.
 */
typedef enum VtreeStatus {
  VTREE_STATUS_OK = 0,
  VTREE_STATUS_NULL_POINTER = 1,
  VTREE_STATUS_INVALID_UTF8 = 2,
  VTREE_STATUS_PARSE_ERROR = 3,
  VTREE_STATUS_DOMAIN_ERROR = 4,
  VTREE_STATUS_MALFORMED_STREAM = 5,
  VTREE_STATUS_TOO_LARGE = 6,
  VTREE_STATUS_PANIC = 7,
} VtreeStatus;

typedef enum VtreeTree {
  VTREE_TREE_V = 0,
  VTREE_TREE_V1 = 1,
  VTREE_TREE_V10 = 2,
  VTREE_TREE_STERN_BROCOT = 3,
  VTREE_TREE_VAN_DER_CORPUT = 4,
} VtreeTree;

/**
 * Opaque exact rational.
 */
typedef struct VtreeRational VtreeRational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or "" if none. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *vtree_last_error(void);

/**
 * Library version as a static string.
 */
const char *vtree_version(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void vtree_string_free(char *s);

/**
 * Parses `"p/q"` or `"p"`.
 *
 * # Safety
 * `text` must be a valid C string; `out` must be writable.
 */
enum VtreeStatus vtree_rational_parse(const char *text, struct VtreeRational **out);

/**
 * Builds `p/q` in lowest terms; `q` must be nonzero.
 *
 * # Safety
 * `out` must be writable.
 */
enum VtreeStatus vtree_rational_new(int64_t p, int64_t q, struct VtreeRational **out);

/**
 * Frees a rational. Null is ignored.
 *
 * # Safety
 * `r` must come from this library and not have been freed.
 */
void vtree_rational_free(struct VtreeRational *r);

/**
 * Formats as `"p/q"`.
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum VtreeStatus vtree_rational_format(const struct VtreeRational *r, char **out);

/**
 * Writes 1 to `out` if `a == b`, else 0.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
enum VtreeStatus vtree_rational_equal(const struct VtreeRational *a,
                                      const struct VtreeRational *b,
                                      int32_t *out);

/**
 * Address of `x` in (0,1) in the V10 tree, as a 0/1 string.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum VtreeStatus vtree_qmf_forward(const struct VtreeRational *x, char **out);

/**
 * Label of the V10 node at `address` (0/1 string, "" for the root).
 *
 * # Safety
 * `address` must be a valid C string; `out` must be writable.
 */
enum VtreeStatus vtree_qmf_inverse(const char *address, struct VtreeRational **out);

/**
 * Dyadic image of `x` in (0,1), as `"a/2^k"`.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum VtreeStatus vtree_qmf_bar(const struct VtreeRational *x, char **out);

/**
 * Minkowski's function at `x` in (0,1), as `"a/2^k"`.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum VtreeStatus vtree_minkowski(const struct VtreeRational *x, char **out);

/**
 * Label of the node at `address` in `kind`.
 *
 * # Safety
 * `address` must be a valid C string; `out` must be writable.
 */
enum VtreeStatus vtree_node_value(enum VtreeTree kind,
                                  const char *address,
                                  struct VtreeRational **out);

/**
 * Address of `x` in `kind`.
 *
 * # Safety
 * `x` must be a live handle; `out` must be writable.
 */
enum VtreeStatus vtree_address_of(enum VtreeTree kind, const struct VtreeRational *x, char **out);

/**
 * Codeword of `b >= 1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum VtreeStatus vtree_encode(uint64_t b, enum VtreeCode code, char **out);

/**
 * Reads one complete codeword from the front of `bits`.
 *
 * # Safety
 * `bits` must be a valid C string; `value` and `consumed` must be writable.
 */
enum VtreeStatus vtree_decode(const char *bits,
                              enum VtreeCode code,
                              uint64_t *value,
                              size_t *consumed);

/**
 * Entropy of `code` under the Gauss-Kuzmin distribution. `divergent` is set
 * to 1 (and `value` to the partial sum) when the series diverges.
 *
 * # Safety
 * All out pointers must be writable.
 */
enum VtreeStatus vtree_entropy(enum VtreeEntropyCode code,
                               double *value,
                               double *error_bound,
                               int32_t *divergent);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VTREE_H */
