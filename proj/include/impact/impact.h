/*
 * impact — C API for impact measures on continuous rank-frequency models.
 *
 * The library evaluates generalized impact measures (integral, average,
 * percentile, h, g, exponent-p h, R, generic crossing measures, step
 * transforms, and the left-limit average) on nonincreasing nonnegative
 * functions over [0, T], emits bundle curves over theta grids, and runs a
 * convergence harness comparing function families against their declared
 * limits.
 *
 * Conventions:
 *  - Every operation returns an imb_status; outputs go through pointers.
 *  - On failure, imb_last_error() returns a thread-local message describing
 *    the most recent error on the calling thread.
 *  - Strings returned through char** are heap-allocated; release them with
 *    imb_string_free().  Objects are released with their *_free function.
 *  - Function specs, family specs, and comparison-curve specs are JSON; see
 *    the README for the schemas.
 */
#ifndef IMPACT_IMPACT_H
#define IMPACT_IMPACT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum imb_status {
  IMB_OK = 0,
  IMB_ERR_INVALID_ARGUMENT = 1, /* null pointers, bad parameters */
  IMB_ERR_PARSE = 2,            /* malformed JSON or CSV input */
  IMB_ERR_DOMAIN = 3,           /* arguments outside the defined domain */
  IMB_ERR_NOT_ADMISSIBLE = 4,   /* measure undefined at this parameter */
  IMB_ERR_CONTINUITY_REQUIRED = 5, /* measure needs a continuous model */
  IMB_ERR_INTERNAL = 6
} imb_status;

typedef struct imb_function imb_function; /* a function model on [0, T] */
typedef struct imb_curve imb_curve;       /* a bundle curve over a grid */
typedef struct imb_report imb_report;     /* a convergence report */
typedef struct imb_suite imb_suite;       /* scenario suite + classification */

const char* imb_version(void);
const char* imb_status_name(imb_status s);
/* Thread-local message for the most recent failure on this thread. */
const char* imb_last_error(void);
void imb_string_free(char* s);

/* -------------------------------------------------------------- functions */

imb_status imb_function_from_json(const char* json_text, imb_function** out);
/* Builds the rank-frequency polyline of a citation record.  counts are
 * nonnegative; they are sorted nonincreasing internally and *was_sorted
 * (nullable) reports whether the input already was.  tail_zero != 0 closes
 * the polyline at zero instead of holding the last count. */
imb_status imb_function_from_counts(const double* counts, size_t n_counts,
                                    int tail_zero, int* was_sorted,
                                    imb_function** out);
/* Same, reading one nonnegative integer per CSV line (a leading non-numeric
 * header line is skipped).  out_n / out_c1 (nullable) receive the number of
 * counts and the largest count. */
imb_status imb_function_from_counts_csv(const char* csv_text, int tail_zero,
                                        int* was_sorted, long long* out_n,
                                        double* out_c1, imb_function** out);
imb_status imb_function_to_json(const imb_function* f, char** out_json);
void imb_function_free(imb_function* f);

imb_status imb_function_domain_end(const imb_function* f, double* out);
imb_status imb_function_eval(const imb_function* f, double x, double* out);
imb_status imb_function_left_limit(const imb_function* f, double x,
                                   double* out);
/* Integral of the model over [0, x], computed in closed form. */
imb_status imb_function_cumulative(const imb_function* f, double x,
                                   double* out);
imb_status imb_function_is_continuous(const imb_function* f, int* out);
imb_status imb_sup_distance(const imb_function* a, const imb_function* b,
                            double* out);

/* --------------------------------------------------------------- measures */

/* Single-measure evaluation.  kind is one of:
 *   "i"          integral over [0, theta]
 *   "mu"         average over [0, theta] (theta = 0 gives F(0))
 *   "percentile" F(theta)
 *   "h"          unique x with F(x) = theta * x
 *   "g"          largest x with integral_0^x F = theta * x^2
 *   "kosmulski"  crossing with theta * x^p (pass p)
 *   "r"          sqrt of the integral up to the h point
 *   "polar"      distance to the graph along the ray at angle theta
 *   "mlimit"     left limit at theta divided by theta
 * p is ignored unless kind is "kosmulski". */
imb_status imb_measure(const imb_function* f, const char* kind, double theta,
                       double p, double* out);
/* Crossing measure against a strictly increasing comparison curve given as
 * a JSON spec ("linear", "power", or "increasing_polyline"). */
imb_status imb_measure_ped(const imb_function* f, const char* fspec_json,
                           double* out);
/* Step transform of the value at beta: low if F(beta) < c, else high. */
imb_status imb_measure_mf(const imb_function* f, double c, double low,
                          double high, double beta, double* out);
/* Smallest admissible theta for the kind (0 when every theta > 0 works). */
imb_status imb_theta0(const imb_function* f, const char* kind, double p,
                      double* out);

/* ---------------------------------------------------------------- bundles */

/* Fills out_grid (caller-allocated, count entries) with a linearly or
 * log-spaced grid with exact endpoints.  count >= 2, lo < hi, and lo > 0
 * for log spacing. */
imb_status imb_make_grid(double lo, double hi, size_t count, int log_spacing,
                         double* out_grid);

/* Bundle curve over a strictly increasing theta grid.  kind as in
 * imb_measure plus "mf" (uses c/low/high and interprets the grid as beta
 * values); "polar" is not a bundle kind.  Inadmissible grid points yield
 * absent values, never failures. */
imb_status imb_bundle(const imb_function* f, const char* kind, double p,
                      double c, double low, double high, const double* grid,
                      size_t grid_len, imb_curve** out);
imb_status imb_curve_size(const imb_curve* c, size_t* out);
imb_status imb_curve_point(const imb_curve* c, size_t i, double* theta,
                           double* value, int* admissible);
imb_status imb_curve_theta0(const imb_curve* c, double* out);
imb_status imb_curve_to_csv(const imb_curve* c, char** out);
imb_status imb_curve_to_json(const imb_curve* c, char** out);
void imb_curve_free(imb_curve* c);

/* ------------------------------------------------------------ convergence */

/* Runs a family (JSON spec) against its declared limit.
 *   kind         "function" for raw-function convergence, else a bundle
 *                kind as in imb_bundle.
 *   grid         x grid ("function") or theta grid (measures).
 *   n_list       strictly increasing member indices; NULL for the default
 *                {3, 10, 100, 1000, 10000}.
 *   boundary_probes  chase the per-member admissibility boundary (crossing
 *                kinds) or the sup-distance scale ("mlimit").
 *   eps_uniform  verdict tolerance; pass 0 for the default 1e-3. */
imb_status imb_converge(const char* family_json, const char* kind, double p,
                        double c, double low, double high, const double* grid,
                        size_t grid_len, const int* n_list, size_t n_len,
                        int boundary_probes, double eps_uniform,
                        imb_report** out);
imb_status imb_report_verdict(const imb_report* r, char** out);
imb_status imb_report_to_json(const imb_report* r, char** out);
/* Long-format CSV rows "<label>,n,theta,error"; empty label uses the
 * family id. */
imb_status imb_report_to_csv(const imb_report* r, const char* label,
                             char** out);
void imb_report_free(imb_report* r);

/* -------------------------------------------------- scenarios and classes */

/* Runs the canonical scenario suite S1..S12 and builds the bundle
 * classification table. */
imb_status imb_run_scenarios(imb_suite** out);
imb_status imb_suite_size(const imb_suite* s, size_t* out);
imb_status imb_suite_id(const imb_suite* s, size_t i, char** out);
imb_status imb_suite_pass(const imb_suite* s, size_t i, int* out);
imb_status imb_suite_all_pass(const imb_suite* s, int* out);
/* Human-readable block: one PASS/FAIL line per scenario, then the table. */
imb_status imb_suite_text(const imb_suite* s, char** out);
/* JSON object {"all_pass":..., "scenarios":[...], "classification":[...]}. */
imb_status imb_suite_to_json(const imb_suite* s, char** out);
/* Long-format CSV of every recorded error across all scenarios. */
imb_status imb_suite_to_csv(const imb_suite* s, char** out);
imb_status imb_suite_classification_text(const imb_suite* s, char** out);
imb_status imb_suite_classification_json(const imb_suite* s, char** out);
void imb_suite_free(imb_suite* s);

#ifdef __cplusplus
}
#endif

#endif /* IMPACT_IMPACT_H */
