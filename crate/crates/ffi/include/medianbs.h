#ifndef MEDIANBS_H
#define MEDIANBS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MbsExceedMethod {
  MBS_EXCEED_METHOD_EXACT = 0,
  MBS_EXCEED_METHOD_NORMAL = 1,
} MbsExceedMethod;

typedef enum MbsMethod {
  MBS_METHOD_MEAN = 0,
  MBS_METHOD_MEDIAN = 1,
} MbsMethod;

/**
 * Result codes. Values 2-4 match the CLI exit codes.
 */
typedef enum MbsStatus {
  MBS_STATUS_OK = 0,
  MBS_STATUS_NULL_POINTER = 1,
  MBS_STATUS_INVALID_ARGUMENT = 2,
  MBS_STATUS_NUMERIC = 3,
  MBS_STATUS_IO = 4,
  MBS_STATUS_TAIL_UNDERFLOW = 5,
  MBS_STATUS_PANIC = 6,
} MbsStatus;

/**
 * Opaque growth model.
 */
typedef struct MbsGrowth MbsGrowth;

/**
 * Opaque market parameters.
 */
typedef struct MbsMarket MbsMarket;

/**
 * A priced call. `conditional_median` is NaN for the mean method.
 */
typedef struct MbsQuote {
  enum MbsMethod method;
  double value;
  double d1;
  double d2;
  double exercise_prob;
  double discount;
  double conditional_median;
} MbsQuote;

typedef struct MbsEstimate {
  double value;
  double std_error;
  size_t paths_used;
  double ci_low;
  double ci_high;
} MbsEstimate;

/**
 * Flattened Monte Carlo validation report. Tail fields are NaN and
 * `tail_pass` is false when the law is a point mass (`has_tail` = false).
 */
typedef struct MbsValidation {
  double mean_analytic;
  struct MbsEstimate mean_empirical;
  double mean_z;
  bool mean_pass;
  double median_analytic;
  struct MbsEstimate median_empirical;
  bool median_pass;
  bool has_tail;
  double tail_analytic;
  double tail_empirical;
  double tail_z;
  bool tail_pass;
} MbsValidation;

typedef struct MbsGrowthStats {
  double mu_l;
  double mu_log;
  double geo_mean;
  double sd_log;
} MbsGrowthStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *mbs_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *mbs_version(void);

enum MbsStatus mbs_norm_cdf(double x, double *out);

enum MbsStatus mbs_norm_pdf(double x, double *out);

enum MbsStatus mbs_norm_quantile(double p, double *out);

enum MbsStatus mbs_market_new(double spot,
                              double strike,
                              double rate,
                              double vol,
                              double tau,
                              struct MbsMarket **out);

void mbs_market_free(struct MbsMarket *market);

enum MbsStatus mbs_bs_price(const struct MbsMarket *market, struct MbsQuote *out);

enum MbsStatus mbs_median_price(const struct MbsMarket *market, struct MbsQuote *out);

enum MbsStatus mbs_bs_price_quadrature(const struct MbsMarket *market, double *out);

enum MbsStatus mbs_conditional_median_above(const struct MbsMarket *market, double k, double *out);

enum MbsStatus mbs_prob_above_mean(const struct MbsMarket *market, double *out);

/**
 * Simulates `paths` terminal prices and checks both formulas. Results are
 * identical for any `workers` value; 0 uses the default pool.
 */
enum MbsStatus mbs_mc_validate(const struct MbsMarket *market,
                               size_t paths,
                               uint64_t seed,
                               size_t chunk,
                               size_t workers,
                               struct MbsValidation *out);

/**
 * Prices a call from `len` terminal prices.
 */
enum MbsStatus mbs_empirical_price(const double *sample,
                                   size_t len,
                                   double strike,
                                   double rate,
                                   double tau,
                                   enum MbsMethod method,
                                   struct MbsEstimate *out);

enum MbsStatus mbs_growth_new(const double *rates,
                              const double *probs,
                              size_t len,
                              double initial,
                              uint32_t horizon,
                              struct MbsGrowth **out);

void mbs_growth_free(struct MbsGrowth *model);

enum MbsStatus mbs_growth_stats(const struct MbsGrowth *model, struct MbsGrowthStats *out);

/**
 * E[S_t]; may be +inf when it overflows.
 */
enum MbsStatus mbs_growth_expected_size(const struct MbsGrowth *model, double *out);

enum MbsStatus mbs_growth_median_size(const struct MbsGrowth *model, double *out);

enum MbsStatus mbs_growth_prob_exceeds(const struct MbsGrowth *model,
                                       double threshold,
                                       enum MbsExceedMethod method,
                                       double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MEDIANBS_H */
