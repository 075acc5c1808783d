#ifndef DEQUANT_H
#define DEQUANT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum DequantStatus {
  DEQUANT_STATUS_OK = 0,
  DEQUANT_STATUS_NULL_POINTER = 1,
  DEQUANT_STATUS_INVALID_UTF8 = 2,
  DEQUANT_STATUS_PARSE = 3,
  DEQUANT_STATUS_DIMENSION_MISMATCH = 4,
  DEQUANT_STATUS_PRECONDITION = 5,
  DEQUANT_STATUS_NUMERICAL = 6,
  DEQUANT_STATUS_PANIC = 7,
} DequantStatus;

typedef enum DequantBracketKind {
  DEQUANT_BRACKET_KIND_STAR = 0,
  DEQUANT_BRACKET_KIND_MOYAL = 1,
  DEQUANT_BRACKET_KIND_POISSON = 2,
} DequantBracketKind;

// Opaque polynomial handle.
typedef struct DequantPoly DequantPoly;

// Opaque dequantisation report handle.
typedef struct DequantReport DequantReport;

// Phase-space observables of a Wigner function.
typedef struct DequantObservables {
  double norm;
  double mean_q;
  double mean_p;
  double purity;
  double negativity;
  double min_value;
} DequantObservables;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *dequant_last_error(void);

// Library version as a static string.
const char *dequant_version(void);

// Parses `text` as a polynomial in `dim` degrees of freedom.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum DequantStatus dequant_poly_parse(const char *text, size_t dim, struct DequantPoly **out);

// Renders a polynomial in the parser grammar. Free the result with
// [`dequant_string_free`].
//
// # Safety
// `p` must come from this library; `out` must be valid.
enum DequantStatus dequant_poly_render(const struct DequantPoly *p, char **out);

// # Safety
// `p` must come from this library or be NULL.
void dequant_poly_free(struct DequantPoly *p);

// # Safety
// `a` and `b` must come from this library; `out` must be valid.
enum DequantStatus dequant_star(const struct DequantPoly *a,
                                const struct DequantPoly *b,
                                struct DequantPoly **out);

// Star product, Moyal bracket or Poisson bracket of `a` and `b`.
//
// # Safety
// `a` and `b` must come from this library; `out` must be valid.
enum DequantStatus dequant_bracket(const struct DequantPoly *a,
                                   const struct DequantPoly *b,
                                   enum DequantBracketKind kind,
                                   struct DequantPoly **out);

// Runs the Grassmann dequantisation pipeline on `h`.
//
// # Safety
// `h` must come from this library; `out` must be valid.
enum DequantStatus dequant_verify(const struct DequantPoly *h, struct DequantReport **out);

// True when the Berezin result equals the classical extended Hamiltonian.
//
// # Safety
// `r` must come from this library or be NULL.
bool dequant_report_is_exact(const struct DequantReport *r);

// Report as a JSON document. Free the result with [`dequant_string_free`].
//
// # Safety
// `r` must come from this library; `out` must be valid.
enum DequantStatus dequant_report_json(const struct DequantReport *r, char **out);

// # Safety
// `r` must come from this library or be NULL.
void dequant_report_free(struct DequantReport *r);

// # Safety
// `s` must be a string returned by this library or NULL.
void dequant_string_free(char *s);

// Observables of the Wigner function of a Gaussian state sampled on an odd
// grid of `n_points` with the square-lattice box length.
//
// # Safety
// `out` must be valid.
enum DequantStatus dequant_gaussian_observables(size_t n_points,
                                                double hbar,
                                                double q0,
                                                double p0,
                                                double sigma_q,
                                                struct DequantObservables *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEQUANT_H */
