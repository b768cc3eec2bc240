#ifndef QUANTRATE_H
#define QUANTRATE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QrStatus {
  QR_STATUS_OK = 0,
  QR_STATUS_NULL_POINTER = 1,
  QR_STATUS_DOMAIN = 2,
  QR_STATUS_BRACKET = 3,
  QR_STATUS_CONVERGENCE = 4,
  QR_STATUS_QUANTIZER = 5,
  QR_STATUS_PARAMETER = 6,
  QR_STATUS_PANIC = 7,
} QrStatus;

/**
 * Opaque symmetric quantizer handle.
 */
typedef struct QrQuantizer QrQuantizer;

/**
 * Loading-factor analysis for one K; rates in nats at `reference_snr`.
 */
typedef struct QrLoadingAnalysis {
  size_t levels;
  double l_star;
  double step_star;
  double l_hat;
  double scaling_law;
  double gamma_at_star;
  double l_mse;
  double reference_snr;
  double gmi_at_star;
  double gmi_at_hat;
} QrLoadingAnalysis;

/**
 * Monte Carlo moment estimate; rates in nats.
 */
typedef struct QrMomentEstimate {
  double exy_conj_re;
  double exy_conj_im;
  double ey2;
  double delta_hat;
  double gmi_hat;
  double std_err_gmi;
  double alpha_hat_re;
  double alpha_hat_im;
  size_t n_samples;
} QrMomentEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL.
 *
 * The pointer stays valid until the next `qr_*` call on the same thread.
 */
const char *qr_last_error_message(void);

/**
 * Uniform mid-rise quantizer with `2 * levels` outputs and the given step.
 *
 * # Safety
 * `out` must be valid for writes. Release the handle with [`qr_quantizer_free`].
 */
enum QrStatus qr_quantizer_new_uniform(size_t levels, double step, struct QrQuantizer **out);

/**
 * Quantizer from `levels - 1` positive thresholds and `levels` positive points.
 *
 * # Safety
 * `thresholds` and `points` must point to `n_thresholds` and `n_points` doubles;
 * `out` must be valid for writes.
 */
enum QrStatus qr_quantizer_new(const double *thresholds,
                               size_t n_thresholds,
                               const double *points,
                               size_t n_points,
                               struct QrQuantizer **out);

/**
 * Releases a handle; NULL is ignored.
 *
 * # Safety
 * `q` must come from a `qr_quantizer_new*` call and not be used afterwards.
 */
void qr_quantizer_free(struct QrQuantizer *q);

/**
 * Number of positive output levels K, or 0 for NULL.
 *
 * # Safety
 * `q` must be NULL or a live handle.
 */
size_t qr_quantizer_levels(const struct QrQuantizer *q);

/**
 * # Safety
 * `q` must be a live handle and `out` valid for writes.
 */
enum QrStatus qr_quantizer_quantize(const struct QrQuantizer *q, double v, double *out);

/**
 * Coefficients `A`, `B` and `gamma = 1 - A^2/B` of a quantizer.
 *
 * # Safety
 * `q` must be a live handle; each out-pointer must be valid for writes.
 */
enum QrStatus qr_quantizer_gamma(const struct QrQuantizer *q,
                                 double *out_a,
                                 double *out_b,
                                 double *out_gamma);

/**
 * GMI in nats for a given `gamma` and linear SNR.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QrStatus qr_gmi_rate(double gamma, double snr, double *out);

/**
 * Gaussian tail probability Q(t).
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QrStatus qr_q_function(double t, double *out);

/**
 * Large-K limit of gamma at loading factor `loading`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QrStatus qr_gamma_bar(double loading, double *out);

/**
 * Closed-form loading-factor estimate for K >= 2.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QrStatus qr_loading_estimate(size_t levels, double *out);

/**
 * Optimal loading factor and related quantities for K >= 2, at 10 dB.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QrStatus qr_optimal_loading(size_t levels, struct QrLoadingAnalysis *out);

/**
 * Simulates `n_samples` channel uses of `Y = q(g V_R/sigma_v) + j q(g V_I/sigma_v)`.
 *
 * # Safety
 * `q` must be a live handle and `out` valid for writes.
 */
enum QrStatus qr_estimate_moments(const struct QrQuantizer *q,
                                  double h_re,
                                  double h_im,
                                  double sigma_x2,
                                  double sigma2,
                                  double gain,
                                  size_t n_samples,
                                  uint64_t seed,
                                  struct QrMomentEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUANTRATE_H */
