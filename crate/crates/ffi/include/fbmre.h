#ifndef FBMRE_H
#define FBMRE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

#define FBMRE_OK 0

#define FBMRE_INVALID_ARGUMENT 1

#define FBMRE_DOMAIN 2

#define FBMRE_NUMERICAL 3

#define FBMRE_SIZE_EXCEEDED 4

#define FBMRE_NULL_POINTER 5

#define FBMRE_PANIC 6

/**
 * `grid_kind` value selecting a fixed number of points per unit time.
 */
#define FBMRE_GRID_FIXED 0

/**
 * `grid_kind` value selecting `m(H) = clamp(ceil(H^{-1/2})^2, m_min, m_max)`.
 */
#define FBMRE_GRID_RULE 1

/**
 * Opaque Hurst-exponent distribution.
 */
typedef struct FbmreLaw FbmreLaw;

/**
 * Opaque circulant-embedding plan for one `(H, n)`.
 */
typedef struct FbmrePlan FbmrePlan;

/**
 * Monte-Carlo settings; obtain defaults from [`fbmre_mc_config_default`].
 */
typedef struct FbmreMcConfig {
  uint64_t n_paths;
  uint64_t seed;
  int grid_kind;
  /**
   * Points per unit time for `FBMRE_GRID_FIXED`.
   */
  uint32_t m_fixed;
  uint32_t m_min;
  uint32_t m_max;
  double barrier;
  double ci_level;
  /**
   * Worker threads; 0 uses all cores.
   */
  uint32_t workers;
} FbmreMcConfig;

typedef struct FbmreEstimate {
  double p_hat;
  double std_err;
  double ci_lo;
  double ci_hi;
  uint64_t n_paths;
  /**
   * Number of surviving paths.
   */
  uint64_t n_hits;
} FbmreEstimate;

typedef struct FbmreFit {
  double slope;
  double slope_se;
  double intercept;
  double r_squared;
  uint64_t n_points;
} FbmreFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *fbmre_version(void);

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on this thread.
 */
const char *fbmre_last_error_message(void);

/**
 * Fills `out` with the library defaults (1e5 paths, seed 0, grid rule
 * `[1, 4096]`, barrier 1, 95% intervals, all cores).
 *
 * # Safety
 * `out` must be null or point to writable memory for one config.
 */
int fbmre_mc_config_default(struct FbmreMcConfig *out);

/**
 * Point mass at `h`.
 *
 * # Safety
 * `out` must be null or writable.
 */
int fbmre_law_point(double h, struct FbmreLaw **out);

/**
 * Uniform law on `[a, b]`.
 *
 * # Safety
 * `out` must be null or writable.
 */
int fbmre_law_uniform(double a, double b, struct FbmreLaw **out);

/**
 * `a + (b − a)·Beta(alpha, beta)`.
 *
 * # Safety
 * `out` must be null or writable.
 */
int fbmre_law_scaled_beta(double alpha, double beta, double a, double b, struct FbmreLaw **out);

/**
 * Discrete law with atoms `hs[i]` of mass `ps[i]`.
 *
 * # Safety
 * `hs` and `ps` must point to `n` readable doubles; `out` null or writable.
 */
int fbmre_law_discrete(const double *hs, const double *ps, size_t n, struct FbmreLaw **out);

/**
 * Law from its JSON form, e.g. `{"type":"uniform","a":0.4,"b":0.8}`.
 *
 * # Safety
 * `json` must be null or a NUL-terminated string; `out` null or writable.
 */
int fbmre_law_from_json(const char *json, struct FbmreLaw **out);

/**
 * # Safety
 * `law` must be null or a handle from an `fbmre_law_*` constructor that
 * has not been freed.
 */
void fbmre_law_free(struct FbmreLaw *law);

/**
 * Essential supremum `H0` of the law.
 *
 * # Safety
 * `law` must be null or a live handle; `out` null or writable.
 */
int fbmre_law_ess_sup(const struct FbmreLaw *law, double *out);

/**
 * Builds the circulant plan for `n` fGn increments at Hurst `h`.
 *
 * # Safety
 * `out` must be null or writable.
 */
int fbmre_plan_new(double h, size_t n, struct FbmrePlan **out);

/**
 * # Safety
 * `plan` must be null or a live handle from [`fbmre_plan_new`].
 */
void fbmre_plan_free(struct FbmrePlan *plan);

/**
 * Length of the circulant ring (number of eigenvalues).
 *
 * # Safety
 * `plan` must be null or a live handle; `out` null or writable.
 */
int fbmre_plan_len(const struct FbmrePlan *plan, size_t *out);

/**
 * Copies the circulant eigenvalues into `buf`, which must hold at least
 * [`fbmre_plan_len`] values.
 *
 * # Safety
 * `plan` must be a live handle and `buf` writable for `cap` doubles.
 */
int fbmre_plan_eigenvalues(const struct FbmrePlan *plan, double *buf, size_t cap);

/**
 * Samples path `index` of stream `seed` at Hurst `h` on the times `k/m`,
 * `k = 0..=ceil(horizon·m)`, writing the values (starting with `B_0 = 0`)
 * into `buf` and their count into `out_len`. A short buffer fails with
 * `FBMRE_SIZE_EXCEEDED` after setting `out_len` to the required length.
 *
 * # Safety
 * `buf` must be writable for `cap` doubles; `out_len` null or writable.
 */
int fbmre_sample_path(double h,
                      double horizon,
                      uint32_t m,
                      uint64_t seed,
                      uint64_t index,
                      double *buf,
                      size_t cap,
                      size_t *out_len);

/**
 * `P(max_{[0,T]} B^H ≤ barrier)` for each of the `n` horizons, with `H`
 * drawn from `law` per path.
 *
 * # Safety
 * `horizons` readable and `out` writable for `n` elements; `law` and `cfg`
 * live.
 */
int fbmre_estimate_persistence(const struct FbmreLaw *law,
                               const double *horizons,
                               size_t n,
                               const struct FbmreMcConfig *cfg,
                               struct FbmreEstimate *out);

/**
 * `P(max_{[0,1]} B^H ≤ ε)` for each of the `n` epsilons. The config
 * barrier is ignored.
 *
 * # Safety
 * As for [`fbmre_estimate_persistence`].
 */
int fbmre_estimate_small_barrier(const struct FbmreLaw *law,
                                 const double *epsilons,
                                 size_t n,
                                 const struct FbmreMcConfig *cfg,
                                 struct FbmreEstimate *out);

/**
 * Weighted fit of `ln p` on `ln x`.
 *
 * # Safety
 * `xs`, `ps` and `ses` readable for `n` doubles; `out` writable.
 */
int fbmre_fit_exponent(const double *xs,
                       const double *ps,
                       const double *ses,
                       size_t n,
                       struct FbmreFit *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FBMRE_H */
