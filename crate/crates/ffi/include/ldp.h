#ifndef LDP_H
#define LDP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LdpGeometry {
  LDP_GEOMETRY_L2 = 0,
  LDP_GEOMETRY_LINF = 1,
} LdpGeometry;

typedef enum LdpLaplaceSensitivity {
  LDP_LAPLACE_SENSITIVITY_L1 = 0,
  LDP_LAPLACE_SENSITIVITY_L2 = 1,
} LdpLaplaceSensitivity;

typedef enum LdpMedianInterval {
  LDP_MEDIAN_INTERVAL_SYMMETRIC = 0,
  LDP_MEDIAN_INTERVAL_NON_NEGATIVE = 1,
} LdpMedianInterval;

// Result code of every fallible call.
typedef enum LdpStatus {
  LDP_STATUS_OK = 0,
  LDP_STATUS_NULL_POINTER = 1,
  LDP_STATUS_PARAMETER = 2,
  LDP_STATUS_DOMAIN = 3,
  LDP_STATUS_SIZE = 4,
  LDP_STATUS_UNSUPPORTED = 5,
  LDP_STATUS_SUPPORT = 6,
  LDP_STATUS_DATA = 7,
  LDP_STATUS_CONFIG = 8,
  LDP_STATUS_IO = 9,
  LDP_STATUS_INTERNAL = 10,
  // Output buffer shorter than the result.
  LDP_STATUS_BUFFER_TOO_SMALL = 11,
  LDP_STATUS_PANIC = 12,
} LdpStatus;

// A configured privatization channel.
typedef struct LdpChannel LdpChannel;

// Seeded random stream.
typedef struct LdpRng LdpRng;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Length in bytes of the calling thread's last error message, excluding the
// terminating NUL; 0 when the last call succeeded.
size_t ldp_last_error_length(void);

// Copy the last error message, NUL-terminated and truncated to fit, into
// `buf`. Returns the number of bytes written excluding the NUL, or -1 if
// `buf` is null or `len` is 0.
//
// # Safety
// `buf` must point to at least `len` writable bytes.
int ldp_last_error_message(char *buf, size_t len);

// Static, NUL-terminated name of a status code.
const char *ldp_status_name(enum LdpStatus status);

// New random stream; never null.
struct LdpRng *ldp_rng_new(uint64_t seed);

// # Safety
// `rng` must come from [`ldp_rng_new`] and not be used afterwards. Null is
// accepted.
void ldp_rng_free(struct LdpRng *rng);

// Uniform draw on [0, 1).
//
// # Safety
// `rng` must be a live handle and `out` writable.
enum LdpStatus ldp_rng_uniform(struct LdpRng *rng, double *out);

// ℓ∞-ball sampler for records with ‖x‖∞ ≤ `radius`.
//
// # Safety
// `out` must be writable.
enum LdpStatus ldp_channel_linf_ball(size_t dim,
                                     double radius,
                                     double eps,
                                     struct LdpChannel **out);

// ℓ2-ball sampler for records with ‖x‖₂ ≤ `radius`.
//
// # Safety
// `out` must be writable.
enum LdpStatus ldp_channel_l2_ball(size_t dim, double radius, double eps, struct LdpChannel **out);

// Debiased randomized response on a sign in {-1, +1}.
//
// # Safety
// `out` must be writable.
enum LdpStatus ldp_channel_sign_rr(double eps, struct LdpChannel **out);

// Truncated Laplace scalar channel for data with E|X|^k ≤ radius_k^k, tuned
// for `n` samples. Pass `k = INFINITY` for data bounded by `radius_k`.
//
// # Safety
// `out` must be writable.
enum LdpStatus ldp_channel_truncated_laplace(double k,
                                             double radius_k,
                                             size_t n,
                                             double eps,
                                             struct LdpChannel **out);

// Coordinatewise Laplace baseline.
//
// # Safety
// `out` must be writable.
enum LdpStatus ldp_channel_laplace(size_t dim,
                                   double radius,
                                   double eps,
                                   enum LdpLaplaceSensitivity sensitivity,
                                   struct LdpChannel **out);

// # Safety
// `ch` must come from an `ldp_channel_*` constructor and not be used
// afterwards. Null is accepted.
void ldp_channel_free(struct LdpChannel *ch);

// Input dimension, or 0 for a null handle.
//
// # Safety
// `ch` must be null or a live handle.
size_t ldp_channel_dim(const struct LdpChannel *ch);

// Magnitude B of the outputs for sampler and randomized-response channels.
// Returns `LDP_STATUS_UNSUPPORTED` for Laplace channels.
//
// # Safety
// `ch` must be a live handle and `out` writable.
enum LdpStatus ldp_channel_output_bound(const struct LdpChannel *ch, double *out);

// Privatize one record `x[0..dim]` into `out[0..dim]`.
//
// # Safety
// `ch` and `rng` must be live handles; `x` and `out` must hold `dim`
// doubles each.
enum LdpStatus ldp_channel_privatize(const struct LdpChannel *ch,
                                     struct LdpRng *rng,
                                     const double *x,
                                     double *out,
                                     size_t dim);

// Private mean of `n` records of dimension `d` in the given norm ball;
// writes `d` values to `out`.
//
// # Safety
// `data` must hold `n * d` doubles, `out` at least `out_len`; `rng` live.
enum LdpStatus ldp_private_mean_vector(const double *data,
                                       size_t n,
                                       size_t d,
                                       enum LdpGeometry geometry,
                                       double radius,
                                       double eps,
                                       struct LdpRng *rng,
                                       double *out,
                                       size_t out_len);

// Private mean of scalars with E|X|^k ≤ radius_k^k.
//
// # Safety
// `data` must hold `n` doubles; `rng` live; `out` writable.
enum LdpStatus ldp_private_mean_scalar(const double *data,
                                       size_t n,
                                       double k,
                                       double radius_k,
                                       double eps,
                                       struct LdpRng *rng,
                                       double *out);

// Private median by SGD over the interval selected by `interval`.
//
// # Safety
// `data` must hold `n` doubles; `rng` live; `out` writable.
enum LdpStatus ldp_private_median(const double *data,
                                  size_t n,
                                  double radius,
                                  enum LdpMedianInterval interval,
                                  double eps,
                                  struct LdpRng *rng,
                                  double *out);

// Sparse mean: ℓ∞ privatization followed by soft thresholding at `lambda`.
// A negative or NaN `lambda` selects the default threshold.
//
// # Safety
// `data` must hold `n * d` doubles, `out` at least `out_len`; `rng` live.
enum LdpStatus ldp_sparse_mean(const double *data,
                               size_t n,
                               size_t d,
                               double radius,
                               double eps,
                               double lambda,
                               struct LdpRng *rng,
                               double *out,
                               size_t out_len);

// sign(v)·max(|v| - lambda, 0), elementwise, in place.
//
// # Safety
// `v` must hold `len` doubles.
enum LdpStatus ldp_soft_threshold(double *v, size_t len, double lambda);

// Private logistic regression by SGD on `n` labeled records. `labels` are
// ±1; features satisfy ‖x‖ ≤ `radius` in `geometry`. Writes `d` values.
//
// # Safety
// `features` must hold `n * d` doubles, `labels` `n`, `out` at least
// `out_len`; `rng` live.
enum LdpStatus ldp_private_logistic(const double *features,
                                    const double *labels,
                                    size_t n,
                                    size_t d,
                                    enum LdpGeometry geometry,
                                    double radius,
                                    double eps,
                                    struct LdpRng *rng,
                                    double *out,
                                    size_t out_len);

// Private trigonometric-series density estimate for data in [0, 1],
// evaluated at `points[0..m]` into `out[0..m]`. The basis order is written
// to `order` when it is non-null.
//
// # Safety
// `data` must hold `n` doubles, `points` and `out` `m` each; `rng` live;
// `order` null or writable.
enum LdpStatus ldp_density_estimate(const double *data,
                                    size_t n,
                                    double beta,
                                    double eps,
                                    struct LdpRng *rng,
                                    const double *points,
                                    double *out,
                                    size_t m,
                                    size_t *order);

// Output magnitude of the ℓ∞ sampler.
//
// # Safety
// `out` must be writable.
enum LdpStatus ldp_linf_bound(size_t d, double radius, double eps, double *out);

// Output magnitude of the ℓ2 sampler.
//
// # Safety
// `out` must be writable.
enum LdpStatus ldp_l2_bound(size_t d, double radius, double eps, double *out);

// Minimax rate of the scalar mean under a k-th moment bound.
//
// # Safety
// `out` must be writable.
enum LdpStatus ldp_mean_rate(double k, size_t n, double eps, double *out);

// Lower bound for the 1-sparse mean.
//
// # Safety
// `out` must be writable.
enum LdpStatus ldp_sparse_mean_lower(size_t d, size_t n, double eps, double *out);

// Minimax rate of density estimation over a Sobolev class of order β.
//
// # Safety
// `out` must be writable.
enum LdpStatus ldp_density_rate(double beta, size_t n, double eps, double *out);

// Lower bound for logistic regression parameter estimation.
//
// # Safety
// `out` must be writable.
enum LdpStatus ldp_logistic_lower(size_t d, size_t n, double eps, double *out);

// Excess-risk bound of the private median.
//
// # Safety
// `out` must be writable.
enum LdpStatus ldp_median_rate(double radius, size_t n, double eps, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LDP_H */
