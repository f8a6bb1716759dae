#ifndef EXTRACTORLAB_H
#define EXTRACTORLAB_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum XlStatus {
  XL_STATUS_OK = 0,
  XL_STATUS_NULL_POINTER = 1,
  XL_STATUS_INVALID_ARGUMENT = 2,
  XL_STATUS_DIMENSION_MISMATCH = 3,
  XL_STATUS_INVALID_STATE = 4,
  XL_STATUS_NOT_PSD = 5,
  XL_STATUS_OVERFLOW = 6,
  XL_STATUS_INFEASIBLE = 7,
  XL_STATUS_NON_CONVERGENCE = 8,
  XL_STATUS_PARSE = 9,
  XL_STATUS_IO = 10,
  XL_STATUS_PANIC = 11,
} XlStatus;

// Opaque classical function family.
typedef struct XlClassicalFamily XlClassicalFamily;

// Opaque bipartite state on `N ⊗ R`.
typedef struct XlState XlState;

// Opaque unitary family.
typedef struct XlUnitaryFamily XlUnitaryFamily;

typedef struct XlFamilyInfo {
  uint32_t n;
  uint32_t m;
  size_t seeds;
  // `log₂ |D|`
  double d;
} XlFamilyInfo;

typedef struct XlCertificate {
  // `λ₁(ψ†ψ − τ†τ)`
  double lambda1_diff;
  // second largest eigenvalue of `ψ†ψ`
  double lambda2_psi;
  bool balanced;
} XlCertificate;

typedef struct XlErrorBound {
  double epsilon;
  // `2√ε`
  double quantum_error;
} XlErrorBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or an empty string. The
// pointer stays valid until the next failing call on the same thread.
const char *xl_last_error(void);

// Library version as a static NUL-terminated string.
const char *xl_version(void);

// Multiplicative hash family `x ↦ top m bits of a·x` over GF(2ⁿ).
//
// # Safety
// `out` must be valid for writes.
enum XlStatus xl_classical_hash_new(uint32_t n, uint32_t m, struct XlClassicalFamily **out);

// Affine permutations `x ↦ a·x + b`, `a ≠ 0`, truncated to m bits.
//
// # Safety
// `out` must be valid for writes.
enum XlStatus xl_classical_permutations_new(uint32_t n, uint32_t m, struct XlClassicalFamily **out);

// Parses a function-family file.
//
// # Safety
// `src` is a NUL-terminated string; `out` must be valid for writes.
enum XlStatus xl_classical_parse(const char *src, struct XlClassicalFamily **out);

// # Safety
// `fam` is null or a handle not yet freed.
void xl_classical_free(struct XlClassicalFamily *fam);

// # Safety
// `fam` is a live handle; `out` must be valid for writes.
enum XlStatus xl_classical_info(const struct XlClassicalFamily *fam, struct XlFamilyInfo *out);

// # Safety
// `fam` is a live handle; `out` must be valid for writes.
enum XlStatus xl_classical_certificate(const struct XlClassicalFamily *fam,
                                       struct XlCertificate *out);

// Exact two-universality test: every pair collides on at most `|D|/|M|` seeds.
//
// # Safety
// `fam` is a live handle; `out` must be valid for writes.
enum XlStatus xl_classical_two_universal(const struct XlClassicalFamily *fam, bool *out);

// Full Clifford group on n qubits, the first m of which are kept.
//
// # Safety
// `out` must be valid for writes.
enum XlStatus xl_unitary_clifford_new(uint32_t n, uint32_t m, struct XlUnitaryFamily **out);

// `t` Haar-random unitaries drawn from `seed`.
//
// # Safety
// `out` must be valid for writes.
enum XlStatus xl_unitary_haar_new(uint32_t n,
                                  uint32_t m,
                                  size_t t,
                                  uint64_t seed,
                                  struct XlUnitaryFamily **out);

// Parses a unitary-family file.
//
// # Safety
// `src` is a NUL-terminated string; `out` must be valid for writes.
enum XlStatus xl_unitary_parse(const char *src, struct XlUnitaryFamily **out);

// # Safety
// `fam` is null or a handle not yet freed.
void xl_unitary_free(struct XlUnitaryFamily *fam);

// # Safety
// `fam` is a live handle; `out` must be valid for writes.
enum XlStatus xl_unitary_info(const struct XlUnitaryFamily *fam, struct XlFamilyInfo *out);

// # Safety
// `fam` is a live handle; `out` must be valid for writes.
enum XlStatus xl_unitary_certificate(const struct XlUnitaryFamily *fam, struct XlCertificate *out);

// Largest operator-norm deviation of the family's second moment from the
// Haar one; zero for an exact 2-design.
//
// # Safety
// `fam` is a live handle; `out` must be valid for writes.
enum XlStatus xl_unitary_two_design_deviation(const struct XlUnitaryFamily *fam, double *out);

// Error bound at min-entropy `k` for output length `m` and seed length `d`.
//
// # Safety
// `cert` is valid for reads; `out` must be valid for writes.
enum XlStatus xl_epsilon(const struct XlCertificate *cert,
                         double k,
                         uint32_t m,
                         double d,
                         struct XlErrorBound *out);

// Parses a state file.
//
// # Safety
// `src` is a NUL-terminated string; `out` must be valid for writes.
enum XlStatus xl_state_parse(const char *src, struct XlState **out);

// Maximally entangled state of two `dim`-level systems.
//
// # Safety
// `out` must be valid for writes.
enum XlStatus xl_state_maximally_entangled(size_t dim, struct XlState **out);

// # Safety
// `state` is null or a handle not yet freed.
void xl_state_free(struct XlState *state);

// Certified `H_min(N|R)` and the relative duality gap of the solve.
// `gap` may be null.
//
// # Safety
// `state` is a live handle; `hmin` must be valid for writes.
enum XlStatus xl_hmin_cond(const struct XlState *state, double *hmin, double *gap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXTRACTORLAB_H */
