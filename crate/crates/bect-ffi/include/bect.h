/* C interface of the two-mode condensate interference toolkit. */

#ifndef BECT_H
#define BECT_H

/* Generated by cbindgen from bect-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum BectStatus {
  BECT_STATUS_OK = 0,
  BECT_STATUS_INVALID_ARGUMENT = 1,
  BECT_STATUS_NULL_POINTER = 2,
  BECT_STATUS_MOMENTUM_KIND = 3,
  BECT_STATUS_BUFFER_TOO_SMALL = 4,
} BectStatus;

// Opaque kernel handle.
typedef struct BectKernel BectKernel;

// Opaque sampler handle.
typedef struct BectSampler BectSampler;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent error on this thread. The pointer
// stays valid until the next failing call on the same thread.
const char *bect_last_error_message(void);

// Library version as a static string.
const char *bect_version(void);

// Create a counterpropagating plane-wave kernel with lattice wavevector
// (kx, ky, kz) != 0. On success writes a handle the caller must release
// with `bect_kernel_free`.
enum BectStatus bect_kernel_plane_wave_new(int64_t kx,
                                           int64_t ky,
                                           int64_t kz,
                                           struct BectKernel **out);

// Create an expanding-Gaussian kernel with half separation `alpha` (in
// widths) at time `t` (in m sigma^2/hbar).
enum BectStatus bect_kernel_gaussian_new(double alpha, double t, struct BectKernel **out);

// Release a kernel handle. Null is ignored.
void bect_kernel_free(struct BectKernel *kernel);

// Evaluate the kernel `F_xy(q)`; writes real and imaginary parts.
//
// # Safety
// `kernel` must be a live handle; `q` must point to three doubles;
// `out_re`/`out_im` must be writable.
enum BectStatus bect_kernel_eval(const struct BectKernel *kernel,
                                 int x,
                                 int y,
                                 const double *q,
                                 double *out_re,
                                 double *out_im);

// Fringe-peak momentum of the kernel (2 k0 or 2 k0(t)) as three doubles.
//
// # Safety
// `kernel` must be a live handle; `out` must point to three doubles.
enum BectStatus bect_kernel_fringe_momentum(const struct BectKernel *kernel, double *out);

// Mode overlap of the kernel (exp(-alpha^2) for Gaussians, 0 for plane
// waves).
//
// # Safety
// `kernel` must be a live handle; `out` must be writable.
enum BectStatus bect_kernel_overlap(const struct BectKernel *kernel, double *out);

// Exact ensemble mean of R(q) over the uniform window ensemble.
//
// # Safety
// `kernel` must be a live handle; `q` must point to three doubles; `out`
// must be writable.
enum BectStatus bect_exact_mean_r(const struct BectKernel *kernel,
                                  uint64_t particles,
                                  uint64_t dim,
                                  const double *q,
                                  double *out);

// Exact run-to-run covariance of the expectation value of R.
//
// # Safety
// `kernel` must be a live handle; `q`/`q2` must point to three doubles
// each; `out` must be writable.
enum BectStatus bect_exact_ensemble_cov(const struct BectKernel *kernel,
                                        uint64_t particles,
                                        uint64_t dim,
                                        const double *q,
                                        const double *q2,
                                        double *out);

// Exact window average of the within-state quantum covariance of R.
//
// # Safety
// `kernel` must be a live handle; `q`/`q2` must point to three doubles
// each; `out` must be writable.
enum BectStatus bect_exact_quantum_cov_avg(const struct BectKernel *kernel,
                                           uint64_t particles,
                                           uint64_t dim,
                                           const double *q,
                                           const double *q2,
                                           double *out);

// Closed-form ensemble mean of R(q).
//
// # Safety
// `kernel` must be a live handle; `q` must point to three doubles; `out`
// must be writable.
enum BectStatus bect_closed_mean_r(const struct BectKernel *kernel,
                                   uint64_t particles,
                                   uint64_t dim,
                                   const double *q,
                                   double *out);

// Closed-form ensemble covariance (order-N^2 truncation).
//
// # Safety
// `kernel` must be a live handle; `q`/`q2` must point to three doubles
// each; `out` must be writable.
enum BectStatus bect_closed_ensemble_cov(const struct BectKernel *kernel,
                                         uint64_t particles,
                                         uint64_t dim,
                                         const double *q,
                                         const double *q2,
                                         double *out);

// Closed-form averaged quantum covariance (order-N^2 truncation).
//
// # Safety
// `kernel` must be a live handle; `q`/`q2` must point to three doubles
// each; `out` must be writable.
enum BectStatus bect_closed_quantum_cov_avg(const struct BectKernel *kernel,
                                            uint64_t particles,
                                            uint64_t dim,
                                            const double *q,
                                            const double *q2,
                                            double *out);

// The seven window moment sums S20, S11, S40, S31, S22, S30, S21 into a
// caller buffer of length >= 7. `closed` selects the closed forms,
// otherwise direct summation.
//
// # Safety
// `out` must point to at least `len` writable doubles.
enum BectStatus bect_sums(uint64_t particles, uint64_t dim, int closed, double *out, size_t len);

// Create a deterministic uniform sampler over the window sphere.
enum BectStatus bect_sampler_new(uint64_t particles,
                                 uint64_t dim,
                                 uint64_t seed,
                                 struct BectSampler **out);

// Release a sampler handle. Null is ignored.
void bect_sampler_free(struct BectSampler *sampler);

// Draw sample `index` into a buffer of interleaved (re, im) pairs; the
// buffer needs `2 n` doubles. Identical (seed, index) pairs produce
// identical coefficients.
//
// # Safety
// `sampler` must be a live handle; `out` must point to at least `len`
// writable doubles.
enum BectStatus bect_sampler_state(const struct BectSampler *sampler,
                                   uint64_t index,
                                   double *out,
                                   size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BECT_H */
