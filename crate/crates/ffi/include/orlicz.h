#ifndef ORLICZ_H
#define ORLICZ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OrliczStatus {
  ORLICZ_STATUS_OK = 0,
  ORLICZ_STATUS_NULL_POINTER = 1,
  ORLICZ_STATUS_INVALID_UTF8 = 2,
  ORLICZ_STATUS_DOMAIN = 3,
  ORLICZ_STATUS_RESOLUTION = 4,
  ORLICZ_STATUS_GEOMETRY = 5,
  ORLICZ_STATUS_CAPABILITY = 6,
  ORLICZ_STATUS_ACCURACY = 7,
  ORLICZ_STATUS_OPTIMIZATION = 8,
  ORLICZ_STATUS_CONSTRUCTION = 9,
  ORLICZ_STATUS_EXPERIMENT = 10,
  ORLICZ_STATUS_PARSE = 11,
  ORLICZ_STATUS_BUFFER_TOO_SMALL = 12,
  ORLICZ_STATUS_PANIC = 13,
} OrliczStatus;

/**
 * A simple function `Σ αᵢ χ_{Mᵢ}`.
 */
typedef struct OrliczSimple OrliczSimple;

/**
 * A composer `ξ` with `ξ(0) = 0`.
 */
typedef struct OrliczXi OrliczXi;

/**
 * A Young function.
 */
typedef struct OrliczYoung OrliczYoung;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Byte length of the last error message on this thread, without the terminator; 0 if none.
 */
size_t orlicz_last_error_length(void);

/**
 * Copy the last error message into `buf` (NUL-terminated, truncated to `len − 1` bytes).
 * Returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t orlicz_last_error_message(char *buf, size_t len);

/**
 * Parse a Young function: `power:P[:SCALE]`, `exp[:SCALE]`, `exp_conjugate[:SCALE]` or JSON.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum OrliczStatus orlicz_young_parse(const char *spec, struct OrliczYoung **out);

/**
 * # Safety
 * `phi` must be null or a handle from this library that is not used afterwards.
 */
void orlicz_young_free(struct OrliczYoung *phi);

/**
 * # Safety
 * `phi` must be a live handle and `out` writable.
 */
enum OrliczStatus orlicz_young_eval(const struct OrliczYoung *phi, double t, double *out);

/**
 * # Safety
 * `phi` must be a live handle and `out` writable.
 */
enum OrliczStatus orlicz_young_inverse(const struct OrliczYoung *phi, double y, double *out);

/**
 * The complementary Young function as a new handle.
 *
 * # Safety
 * `phi` must be a live handle and `out` writable.
 */
enum OrliczStatus orlicz_young_conjugate(const struct OrliczYoung *phi, struct OrliczYoung **out);

/**
 * Parse a simple function from `{"dim": n, "terms": [{"value": a, "region": {...}}, ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum OrliczStatus orlicz_simple_from_json(const char *json, struct OrliczSimple **out);

/**
 * # Safety
 * `h` must be null or a handle from this library that is not used afterwards.
 */
void orlicz_simple_free(struct OrliczSimple *h);

/**
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum OrliczStatus orlicz_simple_dim(const struct OrliczSimple *h, size_t *out);

/**
 * Modular, Luxemburg norm and Orlicz (Amemiya) norm of `h`. Any output pointer may be null.
 *
 * # Safety
 * Handles must be live; non-null outputs must be writable.
 */
enum OrliczStatus orlicz_norms(const struct OrliczYoung *phi,
                               const struct OrliczSimple *h,
                               double *modular_out,
                               double *luxemburg_out,
                               double *orlicz_out);

/**
 * Parse `ξ`: `identity`, `poly:c1,c2,…`, `pow:k`, `signed:FAMILY…`, `tanh:a,b` or JSON.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum OrliczStatus orlicz_xi_parse(const char *spec, struct OrliczXi **out);

/**
 * # Safety
 * `xi` must be null or a handle from this library that is not used afterwards.
 */
void orlicz_xi_free(struct OrliczXi *xi);

/**
 * `Ψ_ξ(h)` into `out[0..dim]`. `written` (may be null) receives `dim`; a short buffer
 * yields `ORLICZ_STATUS_BUFFER_TOO_SMALL`.
 *
 * # Safety
 * Handles must be live; `out` must hold `len` doubles.
 */
enum OrliczStatus orlicz_psi(const struct OrliczXi *xi,
                             const struct OrliczSimple *h,
                             double *out,
                             size_t len,
                             size_t *written);

/**
 * Moment vector `∫_P x dx` of the hull of `count` points stored row-major in `coords`.
 *
 * # Safety
 * `coords` must hold `count·dim` doubles; `out` must hold `len` doubles.
 */
enum OrliczStatus orlicz_polytope_moment(const double *coords,
                                         size_t count,
                                         size_t dim,
                                         double *out,
                                         size_t len);

/**
 * Run a verification battery at default scale; `pass` receives 1 or 0.
 *
 * # Safety
 * `suite` must be a NUL-terminated string; `pass` must be writable.
 */
enum OrliczStatus orlicz_verify(const char *suite, uint64_t seed, int32_t *pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORLICZ_H */
