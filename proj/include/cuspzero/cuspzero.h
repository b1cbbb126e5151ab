#ifndef CUSPZERO_H
#define CUSPZERO_H

/* C interface to the cuspzero library: level-one Hecke eigenforms, their real zeros,
 * and the Gaussian random model. All handles are opaque; every fallible call returns
 * a cz_status and leaves a message retrievable with cz_last_error() on the same thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(CUSPZERO_BUILDING)
#define CZ_API __attribute__((visibility("default")))
#else
#define CZ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  CZ_OK = 0,
  CZ_ERR_INVALID_ARGUMENT = 1,
  CZ_ERR_INSUFFICIENT_COEFFICIENTS = 2,
  CZ_ERR_UNREACHABLE_TOLERANCE = 3,
  CZ_ERR_OUTSIDE_REGIME = 4,
  CZ_ERR_INDETERMINATE = 5,
  CZ_ERR_NUMERIC = 6,
  CZ_ERR_ZERO_ON_CONTOUR = 7,
  CZ_ERR_IO = 8,
  CZ_ERR_FORMAT = 9,
  CZ_ERR_NOT_FOUND = 10,
  CZ_ERR_INTERNAL = 11
} cz_status;

typedef enum { CZ_DELTA1 = 1, CZ_DELTA2 = 2, CZ_DELTA3 = 3 } cz_segment;

typedef struct cz_eigenform cz_eigenform;
typedef struct cz_census cz_census;

CZ_API const char* cz_version(void);
/* Message for the most recent failure on this thread; empty after success. */
CZ_API const char* cz_last_error(void);
CZ_API const char* cz_status_name(cz_status s);

CZ_API int cz_dim_cusp(int k);

/* ---- eigenforms ---- */

/* Eigenform number idx (1-based, ascending lambda(2)) of weight k.
 * With a non-NULL cache_dir, a valid cache file is reused unless force is set; otherwise
 * every form of weight k is computed and all of them are written to the cache.
 * *from_cache (optional) reports whether the form was read from disk. */
CZ_API cz_status cz_eigenform_get(int k, int idx, int precision_bits, int nterms, const char* cache_dir, int force,
                                  cz_eigenform** out, int* from_cache);
CZ_API cz_status cz_eigenform_load(const char* path, cz_eigenform** out);
CZ_API cz_status cz_eigenform_save(const cz_eigenform* f, const char* path);
CZ_API void cz_eigenform_free(cz_eigenform* f);

CZ_API cz_status cz_eigenform_info(const cz_eigenform* f, int* weight, int* idx, int* precision_bits, int* nterms);
CZ_API cz_status cz_lambda(const cz_eigenform* f, long n, double* out);
/* lambda(n) in scientific notation with `digits` significant digits. */
CZ_API cz_status cz_lambda_string(const cz_eigenform* f, long n, int digits, char* buf, size_t len);
CZ_API cz_status cz_verify_hecke(const cz_eigenform* f, double tol, double* max_residual, int* pass);

/* ---- evaluator ---- */

/* f(alpha + i y) up to a positive y-dependent factor: exp(log_mag + i phase), error exp(log_tail). */
CZ_API cz_status cz_f_value(const cz_eigenform* f, double alpha, double y, double rel_tol, double* log_mag,
                            double* phase, double* log_tail);
/* Certified real restriction on a segment (param = y, or theta for CZ_DELTA3); sign 0 if undetermined. */
CZ_API cz_status cz_real_value(const cz_eigenform* f, cz_segment seg, double param, double* value, double* error,
                               double* log_scale, int* sign);
CZ_API cz_status cz_winding_count(const cz_eigenform* f, double y, int* count);
CZ_API cz_status cz_ladder_residual(const cz_eigenform* f, int l, double alpha, double y, double* out);
CZ_API cz_status cz_theorem2_residual(const cz_eigenform* f, int l, double alpha, double delta, double* out);

/* ---- census ---- */

typedef struct {
  const double* Ys; /* Siegel heights; may be NULL when nY == 0 */
  int nY;
  double tol;          /* bracket width for refined zeros */
  double t_step;       /* grid step in t = (k - 1) / (4 pi y) */
  int arc_points;      /* 0: ceil(k / 4) */
  int ladder_max;      /* strips checked by winding; 0: ceil(2 sqrt k); negative disables */
  int with_predictions;
  int with_witnesses;  /* append sign-combinatorics rows to the zero CSV */
} cz_census_options;

CZ_API void cz_census_options_default(cz_census_options* opt);
CZ_API cz_status cz_census_run(const cz_eigenform* f, const cz_census_options* opt, cz_census** out);
CZ_API void cz_census_free(cz_census* c);

CZ_API cz_status cz_census_counts(const cz_census* c, int* n_delta1, int* n_delta2, int* n_delta3);
CZ_API int cz_census_zero_count(const cz_census* c);
CZ_API cz_status cz_census_zero(const cz_census* c, int i, cz_segment* seg, double* lo, double* hi, double* location,
                                int* corner);
CZ_API int cz_census_siegel_count(const cz_census* c);
/* ratio is NaN when undefined; ok is 0 when the entry carries an error status. */
CZ_API cz_status cz_census_siegel(const cz_census* c, int i, double* Y, int* total, int* real_zeros, double* ratio,
                                  int* ok);
CZ_API int cz_census_error_count(const cz_census* c);
CZ_API cz_status cz_census_write_zeros(const cz_census* c, const char* path);
/* Appends summary rows; writes the header first when the file is new or empty. */
CZ_API cz_status cz_census_append_summary(const cz_census* c, const char* path);

/* ---- sign combinatorics ---- */

CZ_API cz_status cz_omega(const cz_eigenform* f, int* omega);
CZ_API cz_status cz_first_negative(const cz_eigenform* f, double eps0, long* n, double* lambda_n, int* found);
CZ_API cz_status cz_lemma_a_exponent(const cz_eigenform* f, long p, int J, int B_cap, int* b);
CZ_API cz_status cz_coprime_pair(const cz_eigenform* f, double xi, long* m1, long* m2);
CZ_API cz_status cz_delta2_witness_count(const cz_eigenform* f, double X, int* count);
CZ_API cz_status cz_parity_pair_count(const cz_eigenform* f, double X, long H, int* count);

/* ---- random model ---- */

CZ_API cz_status cz_ek_density(double k, double alpha, double y, double* out);
CZ_API cz_status cz_stitched_density(double k, double y, double* out);
/* lo > hi selects the default range of the segment. */
CZ_API cz_status cz_expected_count(double k, cz_segment seg, double lo, double hi, double* out);
CZ_API cz_status cz_density_profile_csv(double k, cz_segment seg, double lo, double hi, int points, const char* path,
                                        double* integrated);
/* counts (optional) receives `trials` per-trial counts. */
CZ_API cz_status cz_monte_carlo(double k, cz_segment seg, double lo, double hi, int trials, uint64_t seed,
                                double coeff_scale, double* mean, double* stderr_out, int* counts);

#ifdef __cplusplus
}
#endif

#endif
