#ifndef AOPSIC_H
#define AOPSIC_H

#include <stddef.h>
#include <stdint.h>

#if defined(AOPSIC_BUILDING_LIBRARY)
#define AOPSIC_API __attribute__((visibility("default")))
#else
#define AOPSIC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aopsic_status {
  AOPSIC_OK = 0,
  AOPSIC_ERR_INVALID_ARGUMENT = 1,
  AOPSIC_ERR_SINGULAR_MATRIX = 2,
  AOPSIC_ERR_NOT_POSITIVE_DEFINITE = 3,
  AOPSIC_ERR_BAD_LENGTH = 4,
  AOPSIC_ERR_EMPTY_INPUT = 5,
  AOPSIC_ERR_EMPTY_CONSTELLATION = 6,
  AOPSIC_ERR_INSUFFICIENT_MOMENTS = 7,
  AOPSIC_ERR_RANK_DEFICIENT = 8,
  AOPSIC_ERR_NON_POSITIVE_NORM = 9,
  AOPSIC_ERR_ZERO_SI_POWER = 10,
  AOPSIC_ERR_DIVERGED = 11,
  AOPSIC_ERR_UNKNOWN_MCS = 12,
  AOPSIC_ERR_CONFIG = 13,
  AOPSIC_ERR_IO = 14,
  AOPSIC_ERR_BUFFER_TOO_SMALL = 15,
  AOPSIC_ERR_INTERNAL = 99
} aopsic_status;

typedef struct aopsic_basis aopsic_basis;
typedef struct aopsic_scenario aopsic_scenario;
typedef struct aopsic_result aopsic_result;
/* Functions returning a handle through `out` set it to NULL when they fail. */

AOPSIC_API const char* aopsic_version(void);
AOPSIC_API const char* aopsic_status_string(aopsic_status status);

/* Message of the last failure on the calling thread; empty after success. */
AOPSIC_API const char* aopsic_last_error(void);

/* Strings returned through char** are owned by the caller. */
AOPSIC_API void aopsic_string_free(char* s);

/* Moments. `out` receives k values: E|x|^{2m} (even) or E|x|^m (all orders). */
AOPSIC_API aopsic_status aopsic_moments_gaussian(double variance, size_t k, double* out);
AOPSIC_API aopsic_status aopsic_moments_uniform(double half_width, size_t k, double* out);
AOPSIC_API aopsic_status aopsic_moments_exponential(double rate, size_t k, int all_orders, double* out);
AOPSIC_API aopsic_status aopsic_moments_qam(int order, size_t k, double* out);
/* iq holds n interleaved (re, im) pairs. */
AOPSIC_API aopsic_status aopsic_moments_estimate(const double* iq, size_t n, size_t k, int all_orders, double* out);

/* Bases. all_orders selects the extended family (degree 0..max_order in |x|). */
AOPSIC_API aopsic_status aopsic_basis_build(const double* moments, size_t count, int all_orders, int max_order,
                                            aopsic_basis** out);
AOPSIC_API aopsic_status aopsic_basis_from_json(const char* json, aopsic_basis** out);
AOPSIC_API void aopsic_basis_free(aopsic_basis* basis);
AOPSIC_API int aopsic_basis_rank(const aopsic_basis* basis);
/* Coefficients of function `index` (0-based), lowest power first. */
AOPSIC_API aopsic_status aopsic_basis_coeffs(const aopsic_basis* basis, int index, double* out, size_t capacity,
                                             size_t* length);
AOPSIC_API aopsic_status aopsic_basis_norm_sq(const aopsic_basis* basis, int index, double* out);
/* Writes rank interleaved (re, im) pairs. */
AOPSIC_API aopsic_status aopsic_basis_evaluate(const aopsic_basis* basis, double re, double im, double* out_iq);
AOPSIC_API aopsic_status aopsic_basis_to_json(const aopsic_basis* basis, char** out);

/* LUT document for 4/16/64/256-QAM. */
AOPSIC_API aopsic_status aopsic_lut_standard_json(int max_order, char** out);

/* QAM moment/basis table as JSON and as aligned text. */
AOPSIC_API aopsic_status aopsic_table(int max_order, char** json_out, char** text_out);

/* Scenarios. */
AOPSIC_API aopsic_status aopsic_scenario_load(const char* path, aopsic_scenario** out);
AOPSIC_API aopsic_status aopsic_scenario_parse(const char* json, aopsic_scenario** out);
AOPSIC_API aopsic_status aopsic_scenario_set_seed(aopsic_scenario* scenario, uint64_t seed);
AOPSIC_API void aopsic_scenario_free(aopsic_scenario* scenario);

/* threads == 0 uses every hardware thread. */
AOPSIC_API aopsic_status aopsic_scenario_run(const aopsic_scenario* scenario, unsigned threads, aopsic_result** out);
AOPSIC_API void aopsic_result_free(aopsic_result* result);
AOPSIC_API size_t aopsic_result_canceller_count(const aopsic_result* result);
AOPSIC_API size_t aopsic_result_length(const aopsic_result* result);
AOPSIC_API const char* aopsic_result_canceller_name(const aopsic_result* result, size_t index);
/* Number of seeds in which canceller `index` diverged. */
AOPSIC_API size_t aopsic_result_diverged_seeds(const aopsic_result* result, size_t index);
AOPSIC_API size_t aopsic_result_seed_count(const aopsic_result* result);
/* Seed-averaged MSE over [from, to) in dB relative to SI power. */
AOPSIC_API aopsic_status aopsic_result_mean_mse_db(const aopsic_result* result, size_t index, size_t from, size_t to,
                                                   double* out);
/* Writes mse.csv, residual.csv and summary.json into dir. */
AOPSIC_API aopsic_status aopsic_result_write(const aopsic_result* result, const char* dir);

/* Welch PSD of every <name>_re/<name>_im pair of a residual CSV file. */
AOPSIC_API aopsic_status aopsic_psd_file(const char* residual_csv, const char* out_csv, size_t segment, double overlap);

#ifdef __cplusplus
}
#endif

#endif
