#ifndef TRACESOS_H
#define TRACESOS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum TsStatus {
  TS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  TS_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range or malformed.
   */
  TS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The computation ran, and the object failed verification.
   */
  TS_STATUS_VERIFICATION_FAILED = 3,
  /**
   * Enumeration would exceed the visit budget.
   */
  TS_STATUS_BUDGET_EXCEEDED = 4,
  /**
   * An internal error was caught at the boundary.
   */
  TS_STATUS_PANIC = 5,
} TsStatus;

/**
 * Which independent expansion computes a trace coefficient.
 */
typedef enum TsOracle {
  /**
   * One term per cyclic word.
   */
  TS_ORACLE_NECKLACE = 0,
  /**
   * Symbolic matrix powers.
   */
  TS_ORACLE_MATRIX = 1,
} TsOracle;

/**
 * A sum-of-squares certificate: Gram blocks paired with monomial vectors.
 */
typedef struct TsCertificate TsCertificate;

/**
 * A polynomial in the entries of `A` and `B` with exact rational coefficients.
 */
typedef struct TsPolynomial TsPolynomial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ts_version(void);

/**
 * Message of the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ts_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string obtained from this library, not yet freed.
 */
void ts_string_free(char *s);

/**
 * Coefficient of `t^r` in `trace((A + tB)^m)` for symmetric `n x n` matrices
 * (`A` diagonal when `diagonal_a` is set).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TsStatus ts_trace_coeff(uintptr_t m,
                             uintptr_t r,
                             uint16_t n,
                             bool diagonal_a,
                             enum TsOracle oracle,
                             struct TsPolynomial **out);

/**
 * Parses a polynomial from the JSON form produced by [`ts_polynomial_to_json`].
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum TsStatus ts_polynomial_from_json(const char *json, struct TsPolynomial **out);

/**
 * Number of nonzero terms.
 *
 * # Safety
 * `p` must be a live polynomial handle; `out` must be valid for writes.
 */
enum TsStatus ts_polynomial_term_count(const struct TsPolynomial *p, uintptr_t *out);

/**
 * Human-readable form, e.g. `2*a[1,1]*b[1,2]^2`.
 *
 * # Safety
 * `p` must be a live polynomial handle; `out` must be valid for writes.
 */
enum TsStatus ts_polynomial_to_string(const struct TsPolynomial *p, char **out);

/**
 * JSON object mapping monomials to exact coefficients.
 *
 * # Safety
 * `p` must be a live polynomial handle; `out` must be valid for writes.
 */
enum TsStatus ts_polynomial_to_json(const struct TsPolynomial *p, char **out);

/**
 * Exact equality of two polynomials.
 *
 * # Safety
 * `a` and `b` must be live polynomial handles; `out` must be valid for writes.
 */
enum TsStatus ts_polynomial_equal(const struct TsPolynomial *a,
                                  const struct TsPolynomial *b,
                                  bool *out);

/**
 * Releases a polynomial handle. Null is ignored.
 *
 * # Safety
 * `p` must be null or a handle from this library, not yet freed.
 */
void ts_polynomial_free(struct TsPolynomial *p);

/**
 * The certificate for the coefficient of `t^2` in `trace((A + tB)^4)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TsStatus ts_cert42_build(uint16_t n, struct TsCertificate **out);

/**
 * The certificate for the coefficient of `t^4` in `trace((A + tB)^8)` with
 * diagonal `A`, using the published parameter values.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TsStatus ts_cert84_build(uint16_t n, struct TsCertificate **out);

/**
 * As [`ts_cert84_build`] with parameters `x_k = num[k-1] / den[k-1]` for
 * `k = 1..=22`; all values must be nonnegative.
 *
 * # Safety
 * `num` and `den` must each point to 22 readable values; `out` must be valid
 * for writes.
 */
enum TsStatus ts_cert84_build_with_params(uint16_t n,
                                          const int64_t *num,
                                          const int64_t *den,
                                          struct TsCertificate **out);

/**
 * Number of Gram blocks.
 *
 * # Safety
 * `c` must be a live certificate handle; `out` must be valid for writes.
 */
enum TsStatus ts_certificate_block_count(const struct TsCertificate *c, uintptr_t *out);

/**
 * Side length of Gram block `k` (0-based).
 *
 * # Safety
 * `c` must be a live certificate handle; `out` must be valid for writes.
 */
enum TsStatus ts_certificate_block_dim(const struct TsCertificate *c, uintptr_t k, uintptr_t *out);

/**
 * Number of monomial vectors sharing Gram block `k`.
 *
 * # Safety
 * `c` must be a live certificate handle; `out` must be valid for writes.
 */
enum TsStatus ts_certificate_block_copies(const struct TsCertificate *c,
                                          uintptr_t k,
                                          uintptr_t *out);

/**
 * Entry `(i, j)` (0-based) of Gram block `k` as an exact rational string.
 *
 * # Safety
 * `c` must be a live certificate handle; `out` must be valid for writes.
 */
enum TsStatus ts_certificate_entry(const struct TsCertificate *c,
                                   uintptr_t k,
                                   uintptr_t i,
                                   uintptr_t j,
                                   char **out);

/**
 * The polynomial `sum_k sum_z zᵀ Q_k z` the certificate represents.
 *
 * # Safety
 * `c` must be a live certificate handle; `out` must be valid for writes.
 */
enum TsStatus ts_certificate_assemble(const struct TsCertificate *c, struct TsPolynomial **out);

/**
 * Checks the certificate exactly: every block is PSD and the assembled sum
 * equals the trace coefficient. Returns [`TsStatus::VerificationFailed`] with
 * the reason in [`ts_last_error`] otherwise.
 *
 * # Safety
 * `c` must be a live certificate handle.
 */
enum TsStatus ts_certificate_verify(const struct TsCertificate *c);

/**
 * Releases a certificate handle. Null is ignored.
 *
 * # Safety
 * `c` must be null or a handle from this library, not yet freed.
 */
void ts_certificate_free(struct TsCertificate *c);

/**
 * Certifies the symmetric `dim x dim` matrix with entries `num[i] / den[i]`
 * (row-major) positive semidefinite. On success the nullity is written to
 * `nullity` when it is non-null. A matrix that is symmetric but not PSD gives
 * [`TsStatus::VerificationFailed`].
 *
 * # Safety
 * `num` and `den` must each point to `dim * dim` readable values; `nullity`
 * must be null or valid for writes.
 */
enum TsStatus ts_psd_check(uintptr_t dim,
                           const int64_t *num,
                           const int64_t *den,
                           uintptr_t *nullity);

/**
 * Runs the necklace-to-cell accounting audit of the `(4,2)` certificate and
 * writes the report as JSON. Returns [`TsStatus::VerificationFailed`] (with
 * the report still written) when a cell does not balance.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TsStatus ts_audit42(uint16_t n, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRACESOS_H */
