/* latdisc: lattice-point counts and discrepancy functions for shifted disks,
 * ellipses and annuli.
 *
 * Every function returns a latdisc_status; on failure the message is
 * available from latdisc_last_error() on the calling thread. Output
 * parameters are written only on success. Strings returned through char**
 * are heap-allocated and released with latdisc_free_string(). */
#ifndef LATDISC_LATDISC_H
#define LATDISC_LATDISC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LATDISC_BUILDING_LIBRARY)
#    define LATDISC_API __declspec(dllexport)
#  else
#    define LATDISC_API __declspec(dllimport)
#  endif
#else
#  define LATDISC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum latdisc_status {
  LATDISC_OK = 0,
  LATDISC_INVALID_ARGUMENT = 1,
  LATDISC_OUT_OF_RANGE = 2,
  LATDISC_ALLOCATION = 3,
  LATDISC_INTERNAL = 4
} latdisc_status;

LATDISC_API const char* latdisc_version(void);
/* Message of the last failure on this thread ("" if none). */
LATDISC_API const char* latdisc_last_error(void);
LATDISC_API void latdisc_free_string(char* s);

/* ---- domains ------------------------------------------------------------ */

typedef enum latdisc_domain_kind {
  LATDISC_DISK = 0,
  LATDISC_ELLIPSE = 1,
  LATDISC_ANNULUS = 2
} latdisc_domain_kind;

typedef enum latdisc_boundary { LATDISC_CLOSED = 0, LATDISC_OPEN = 1 } latdisc_boundary;

/* a, b: ellipse semi-axes; t: annulus half-thickness. Unused fields are
 * ignored. */
typedef struct latdisc_domain {
  latdisc_domain_kind kind;
  double a;
  double b;
  double t;
  latdisc_boundary boundary;
} latdisc_domain;

/* "disk", "ellipse:a,b" or "annulus:t". */
LATDISC_API latdisc_status latdisc_domain_parse(const char* text, latdisc_boundary boundary,
                                                latdisc_domain* out);
LATDISC_API latdisc_status latdisc_domain_describe(const latdisc_domain* domain, char** out);

/* ---- counting ----------------------------------------------------------- */

typedef struct latdisc_count_result {
  uint64_t count;
  double measure;
  uint64_t boundary_hits;
} latdisc_count_result;

/* Exact #{(j,k) : (j - x1, k - x2) in R * domain}; 1 <= R <= 2^25. */
LATDISC_API latdisc_status latdisc_count(const latdisc_domain* domain, double R, double x1,
                                         double x2, latdisc_count_result* out);
/* O(R^2) enumeration, R <= 500. */
LATDISC_API latdisc_status latdisc_count_bruteforce(const latdisc_domain* domain, double R,
                                                    double x1, double x2,
                                                    latdisc_count_result* out);
LATDISC_API latdisc_status latdisc_gauss_n(double R, uint64_t* out);
/* #{n : |n|^2 <= m}, i.e. N(sqrt m) with the exact root; m <= 2^50. */
LATDISC_API latdisc_status latdisc_gauss_n_squared(uint64_t m, uint64_t* out);
LATDISC_API latdisc_status latdisc_r2(uint64_t k, uint64_t* out);

/* ---- discrepancy -------------------------------------------------------- */

typedef struct latdisc_disc_sample {
  uint64_t count;
  double measure;
  double value;
  uint64_t boundary_hits;
} latdisc_disc_sample;

LATDISC_API latdisc_status latdisc_disc(const latdisc_domain* domain, double R, double x1,
                                        double x2, latdisc_disc_sample* out);
LATDISC_API latdisc_status latdisc_disc_annulus_identity_residual(double R, double t, double x1,
                                                                  double x2, double* out);
/* quad_points >= 16; workers = 0 uses every hardware thread. */
LATDISC_API latdisc_status latdisc_disc_mollified(const latdisc_domain* domain, double R,
                                                  double x1, double x2, double delta,
                                                  int quad_points, unsigned workers,
                                                  double* out);

typedef struct latdisc_sandwich_report {
  uint64_t samples;
  uint64_t pointwise_violations;
  double max_pointwise_excess;
  double d_minus;
  double d;
  double d_plus;
  double margin;
  int sum_ordered;
  int power2_holds;
  int power4_holds;
  int max_form_holds;
  uint64_t violations;
} latdisc_sandwich_report;

LATDISC_API latdisc_status latdisc_sandwich_check(const latdisc_domain* domain, double R,
                                                  double x1, double x2, double delta,
                                                  uint64_t samples, uint64_t seed,
                                                  int quad_points,
                                                  latdisc_sandwich_report* out);

/* ---- special functions and transforms ----------------------------------- */

LATDISC_API latdisc_status latdisc_bessel_j(int order, double s, double* out);
LATDISC_API latdisc_status latdisc_bessel_j_zero(int order, int k, double* out);
LATDISC_API latdisc_status latdisc_bump_value(double r, double* out);
LATDISC_API latdisc_status latdisc_bump_fourier(double rho, double* out);
LATDISC_API latdisc_status latdisc_chi_hat_disk(double R, double xi1, double xi2, double* out);
LATDISC_API latdisc_status latdisc_chi_hat_annulus_exact(double R, double t, double xi1,
                                                         double xi2, double* out);
LATDISC_API latdisc_status latdisc_chi_hat_annulus_asymptotic(double R, double t, double xi1,
                                                              double xi2, double* out);
LATDISC_API latdisc_status latdisc_a_delta(int n1, int n2, double R, double delta, double* re,
                                           double* im);

/* ---- coefficient tables ------------------------------------------------- */

typedef struct latdisc_coeff_table latdisc_coeff_table;

typedef struct latdisc_coeff_info {
  double R;
  double param; /* t or delta */
  int trunc_N;
  int conv_N;
  double tail;
  double energy; /* sum of |value|^2 */
  size_t size;
} latdisc_coeff_info;

LATDISC_API latdisc_status latdisc_annulus_coeff_table(double R, double t, int trunc_N,
                                                       unsigned workers,
                                                       latdisc_coeff_table** out);
LATDISC_API latdisc_status latdisc_a_delta_table(double R, double delta, int trunc_N,
                                                 unsigned workers, latdisc_coeff_table** out);
LATDISC_API latdisc_status latdisc_b_delta_table(double R, double delta, int trunc_N,
                                                 int conv_N, unsigned workers,
                                                 latdisc_coeff_table** out);
LATDISC_API latdisc_status latdisc_coeff_table_info(const latdisc_coeff_table* table,
                                                    latdisc_coeff_info* out);
/* Entries are sorted by (n1, n2). */
LATDISC_API latdisc_status latdisc_coeff_table_entry(const latdisc_coeff_table* table,
                                                     size_t index, int* n1, int* n2,
                                                     double* re, double* im);
LATDISC_API latdisc_status latdisc_coeff_table_lookup(const latdisc_coeff_table* table, int n1,
                                                      int n2, double* re, double* im);
/* Columns n1,n2,re,im. */
LATDISC_API latdisc_status latdisc_coeff_table_csv(const latdisc_coeff_table* table, char** out);
LATDISC_API void latdisc_coeff_table_free(latdisc_coeff_table* table);

typedef enum latdisc_parseval_mode {
  LATDISC_PARSEVAL_ANNULUS_M2 = 0,
  LATDISC_PARSEVAL_MOLLIFIED_M4 = 1
} latdisc_parseval_mode;

typedef struct latdisc_parseval_report {
  double coeff_sum;
  double grid_value;
  double tail;
  double rel_gap;
  double rel_gap_with_tail;
} latdisc_parseval_report;

LATDISC_API latdisc_status latdisc_parseval_check(latdisc_parseval_mode mode, double R,
                                                  double t_or_delta, int trunc_N, int grid_m,
                                                  unsigned workers,
                                                  latdisc_parseval_report* out);

/* ---- moments ------------------------------------------------------------ */

typedef enum latdisc_estimator_kind {
  LATDISC_GRID = 0,
  LATDISC_MONTE_CARLO = 1
} latdisc_estimator_kind;

typedef struct latdisc_estimator {
  latdisc_estimator_kind kind;
  uint64_t size; /* grid side m, or number of samples */
  uint64_t seed;
} latdisc_estimator;

typedef struct latdisc_moment {
  latdisc_domain domain;
  double R;
  double p;
  latdisc_estimator estimator;
  double estimate;
  double lp_norm;
  double std_error;
} latdisc_moment;

LATDISC_API latdisc_status latdisc_moment_estimate(const latdisc_domain* domain, double R,
                                                   double p, const latdisc_estimator* est,
                                                   unsigned workers, latdisc_moment* out);

typedef enum latdisc_t_rule_kind {
  LATDISC_T_FIXED = 0,
  LATDISC_T_POWER_LAW = 1
} latdisc_t_rule_kind;

typedef struct latdisc_t_rule {
  latdisc_t_rule_kind kind;
  double value; /* t, or alpha with t = R^alpha */
} latdisc_t_rule;

typedef struct latdisc_moment_table latdisc_moment_table;

/* Cells are ordered R outer, p inner. t_rule may be NULL. */
LATDISC_API latdisc_status latdisc_sweep(const latdisc_domain* domain, const double* radii,
                                         size_t n_radii, const double* ps, size_t n_ps,
                                         const latdisc_estimator* est,
                                         const latdisc_t_rule* t_rule, unsigned workers,
                                         latdisc_moment_table** out);
LATDISC_API size_t latdisc_moment_table_size(const latdisc_moment_table* table);
/* Returns the cell's own failure status if that cell could not be computed;
 * out is filled with its parameters either way. */
LATDISC_API latdisc_status latdisc_moment_table_cell(const latdisc_moment_table* table,
                                                     size_t index, latdisc_moment* out);
/* Rebuilds a table from cells, e.g. ones read back from a cache. Cells whose
 * estimate is not finite are treated as failed. */
LATDISC_API latdisc_status latdisc_moment_table_from_cells(const latdisc_moment* cells, size_t n,
                                                           const latdisc_t_rule* t_rule,
                                                           latdisc_moment_table** out);
LATDISC_API void latdisc_moment_table_free(latdisc_moment_table* table);

typedef struct latdisc_scaling_fit {
  double slope;
  double intercept;
  double stderr_slope;
  double r_squared;
  double sse;
  double sst;
  size_t points;
} latdisc_scaling_fit;

/* log_corrected != 0 fits log(moment / (R^s log R)). */
LATDISC_API latdisc_status latdisc_scaling_fit_table(const latdisc_moment_table* table,
                                                     double p, int log_corrected, double s,
                                                     latdisc_scaling_fit* out);
LATDISC_API latdisc_status latdisc_fit_power_law(const double* radii, const double* values,
                                                 size_t n, int log_corrected, double s,
                                                 latdisc_scaling_fit* out);

typedef struct latdisc_envelope_config {
  double theta;
  double epsilon;
  latdisc_t_rule t_rule;
} latdisc_envelope_config;

typedef struct latdisc_envelope_row {
  const char* bound; /* owned by the report */
  const char* domain;
  const char* regime;
  const char* note;
  double R;
  double t;
  double p;
  double measured;
  double envelope;
  double ratio;
  int excluded;
} latdisc_envelope_row;

typedef struct latdisc_envelope_summary {
  const char* bound;
  double p;
  size_t cells;
  double min_ratio;
  double max_ratio;
  int bounded;
} latdisc_envelope_summary;

typedef struct latdisc_envelope_report latdisc_envelope_report;

LATDISC_API latdisc_status latdisc_envelope_report_create(const latdisc_moment_table* table,
                                                          const latdisc_envelope_config* config,
                                                          latdisc_envelope_report** out);
LATDISC_API size_t latdisc_envelope_row_count(const latdisc_envelope_report* report);
LATDISC_API latdisc_status latdisc_envelope_row_at(const latdisc_envelope_report* report,
                                                   size_t index, latdisc_envelope_row* out);
LATDISC_API size_t latdisc_envelope_summary_count(const latdisc_envelope_report* report);
LATDISC_API latdisc_status latdisc_envelope_summary_at(const latdisc_envelope_report* report,
                                                       size_t index,
                                                       latdisc_envelope_summary* out);
LATDISC_API void latdisc_envelope_report_free(latdisc_envelope_report* report);

/* "thin", "thick_p_lt_4", "thick_p_ge_4" (or "boundary" for the power-law form). */
LATDISC_API latdisc_status latdisc_annulus_regime(double R, double t, double theta, double p,
                                                  char** out);
LATDISC_API latdisc_status latdisc_annulus_regime_for_power_law(double theta, double alpha,
                                                                double p, char** out);

/* ---- count histogram ---------------------------------------------------- */

typedef struct latdisc_histogram latdisc_histogram;

typedef struct latdisc_histogram_info {
  double R;
  double t;
  uint64_t shifts;
  uint64_t seed;
  size_t bins; /* frequency is defined for k < bins */
  double mean;
  double variance;
  double stderr_mean;
  double lambda;
  double tv_distance;
} latdisc_histogram_info;

LATDISC_API latdisc_status latdisc_count_histogram(double R, double t, uint64_t shifts,
                                                   uint64_t seed, unsigned workers,
                                                   latdisc_histogram** out);
LATDISC_API latdisc_status latdisc_histogram_info_get(const latdisc_histogram* h,
                                                      latdisc_histogram_info* out);
LATDISC_API latdisc_status latdisc_histogram_frequency(const latdisc_histogram* h, size_t k,
                                                       uint64_t* out);
LATDISC_API void latdisc_histogram_free(latdisc_histogram* h);

#ifdef __cplusplus
}
#endif

#endif /* LATDISC_LATDISC_H */
