#ifndef HKSYM_H
#define HKSYM_H

/* C interface of the hksym library. All handles are opaque. Functions
 * return a status code; on failure hksym_last_error() describes the error
 * for the calling thread. Strings returned through char** are owned by
 * the caller and released with hksym_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HKSYM_API __declspec(dllexport)
#else
#define HKSYM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hksym_status {
  HKSYM_OK = 0,
  HKSYM_ERR_ARGUMENT = 1,     /* null handle or pointer */
  HKSYM_ERR_INPUT = 2,        /* bad space grammar, inadmissible parameters, bad sizes */
  HKSYM_ERR_DOMAIN = 3,       /* point outside the domain of a scalar function */
  HKSYM_ERR_SINGULAR = 4,     /* singular operator */
  HKSYM_ERR_CONSTRUCTION = 5, /* structure construction failed */
  HKSYM_ERR_INTERNAL = 6
} hksym_status;

typedef struct hksym_params {
  double a0;
  double a1;
  double a2;
  int eps; /* +1 or -1 */
} hksym_params;

typedef struct hksym_space hksym_space;
typedef struct hksym_campaign hksym_campaign;
typedef struct hksym_report hksym_report;

HKSYM_API const char* hksym_version(void);
HKSYM_API const char* hksym_last_error(void);
HKSYM_API const char* hksym_status_name(hksym_status s);
HKSYM_API void hksym_string_free(char* s);

/* "a0,a1,a2,+1" <-> struct. Formatting uses the shortest round-trip form. */
HKSYM_API hksym_status hksym_params_parse(const char* text, hksym_params* out);
HKSYM_API hksym_status hksym_params_format(const hksym_params* p, char** out);

/* Spaces: "su:p,q", "sp:n", "so*:n", "soB:n". */
HKSYM_API hksym_status hksym_space_create(const char* spec, hksym_space** out);
HKSYM_API void hksym_space_destroy(hksym_space* s);
HKSYM_API hksym_status hksym_space_name(const hksym_space* s, char** out);
HKSYM_API hksym_status hksym_space_rank(const hksym_space* s, int* out);
HKSYM_API hksym_status hksym_space_dim_m(const hksym_space* s, int* out);

/* HKSYM_ERR_INPUT naming the violated constraint when p is not admissible
 * for the restricted root type of s. */
HKSYM_API hksym_status hksym_space_check_params(const hksym_space* s, const hksym_params* p);

/* Restricted root table as JSON, or as a text table when text != 0. */
HKSYM_API hksym_status hksym_space_roots(const hksym_space* s, int text, char** out);

/* B_w, Upsilon_*, R_w, S_w at w = Ad_k(sum x_j X_j), with k drawn from the
 * seed (seed 0 with no_k != 0 gives k = 1). JSON, or text when text != 0. */
HKSYM_API hksym_status hksym_space_eval(const hksym_space* s, const hksym_params* p, const double* x,
                                        size_t n, uint64_t seed, int no_k, int text, char** out);

HKSYM_API hksym_status hksym_campaign_create(hksym_campaign** out);
HKSYM_API void hksym_campaign_destroy(hksym_campaign* c);
HKSYM_API hksym_status hksym_campaign_add_space(hksym_campaign* c, const char* spec);
HKSYM_API hksym_status hksym_campaign_add_params(hksym_campaign* c, const hksym_params* p);
HKSYM_API hksym_status hksym_campaign_set_seed(hksym_campaign* c, uint64_t seed);
HKSYM_API hksym_status hksym_campaign_set_samples(hksym_campaign* c, int samples);
/* Non-positive values keep the defaults (1e-9 and 1e-6). */
HKSYM_API hksym_status hksym_campaign_set_tolerances(hksym_campaign* c, double algebraic,
                                                     double finite_difference);
HKSYM_API hksym_status hksym_campaign_set_threads(hksym_campaign* c, int threads);

/* Validates every (space, params) pair before running. */
HKSYM_API hksym_status hksym_campaign_run(const hksym_campaign* c, hksym_report** out);

HKSYM_API void hksym_report_destroy(hksym_report* r);
/* timestamp may be NULL or empty to omit the field. */
HKSYM_API hksym_status hksym_report_json(const hksym_report* r, const char* timestamp, char** out);
HKSYM_API hksym_status hksym_report_text(const hksym_report* r, char** out);
HKSYM_API hksym_status hksym_report_counts(const hksym_report* r, int* checks, int* failed_checks,
                                           int* controls_passed);
/* 1 when every check passed and every negative control failed. */
HKSYM_API int hksym_report_ok(const hksym_report* r);

#ifdef __cplusplus
}
#endif

#endif
