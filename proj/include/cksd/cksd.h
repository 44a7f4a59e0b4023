/*
 * cksd -- goodness-of-fit tests for right-censored time-to-event data.
 *
 * C API over the core library: opaque handles, integer status codes, and a
 * per-thread error message. All functions return CKSD_OK (0) on success.
 * Handles are created by *_create/*_generate functions and released with the
 * matching *_free; they are immutable and may be shared across threads.
 */
#ifndef CKSD_CKSD_H
#define CKSD_CKSD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CKSD_API __declspec(dllexport)
#else
#define CKSD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cksd_status {
  CKSD_OK = 0,
  CKSD_ERR_PARAM = 1,       /* parameter outside its domain */
  CKSD_ERR_FAMILY = 2,      /* unknown model family */
  CKSD_ERR_EMPTY = 3,       /* empty input */
  CKSD_ERR_DEGENERATE = 4,  /* degenerate sample (no usable bandwidth) */
  CKSD_ERR_BOUNDARY = 5,    /* hazard unbounded at 0 (survival operator) */
  CKSD_ERR_HAZARD = 6,      /* invalid hazard at an uncensored point */
  CKSD_ERR_TRANSFORM = 7,   /* probability transform reached 1 */
  CKSD_ERR_VARIANCE = 8,    /* zero log-rank variance */
  CKSD_ERR_MODEL = 9,       /* model evaluators incoherent */
  CKSD_ERR_NUMERIC = 10,    /* quadrature/root finding failed */
  CKSD_ERR_PARSE = 11,      /* CSV/config/spec syntax */
  CKSD_ERR_IO = 12,         /* file I/O */
  CKSD_ERR_UNKNOWN = 99
} cksd_status;

/* Message describing the most recent failure on this thread. */
CKSD_API const char* cksd_last_error(void);

CKSD_API const char* cksd_version(void);

/* ------------------------------------------------------------------ */
/* Censored samples                                                    */

typedef struct cksd_sample cksd_sample;

/* events[i]: 1 = event observed, 0 = censored. */
CKSD_API cksd_status cksd_sample_create(const double* times, const int* events,
                                        size_t n, cksd_sample** out);

/* CSV with mandatory `time` and `status` columns (header required). Extra
 * columns are ignored; a note is appended to the warning buffer when one is
 * supplied (pass NULL/0 to skip). */
CKSD_API cksd_status cksd_sample_from_csv(const char* path, cksd_sample** out,
                                          char* warning_buf, size_t warning_len);

CKSD_API void cksd_sample_free(cksd_sample* sample);
CKSD_API size_t cksd_sample_size(const cksd_sample* sample);
CKSD_API size_t cksd_sample_events(const cksd_sample* sample);

/* Copies the observations into caller-provided arrays of length >= n. */
CKSD_API cksd_status cksd_sample_get(const cksd_sample* sample, double* times,
                                     int* events);

/* ------------------------------------------------------------------ */
/* Null models                                                         */

typedef struct cksd_model cksd_model;

/* Spec grammar: "exp:rate=1", "weibull:shape=2,rate=1", "periodic:freq=3",
 * "uniform". Construction validates evaluator coherence. */
CKSD_API cksd_status cksd_model_create(const char* spec, cksd_model** out);
CKSD_API void cksd_model_free(cksd_model* model);
CKSD_API const char* cksd_model_describe(const cksd_model* model);

/* Exponential censoring rate that yields the target censored fraction for
 * survival times drawn from `model`. target = 0 gives rate 0. */
CKSD_API cksd_status cksd_calibrate_censoring(const cksd_model* model,
                                              double target, double* rate_out);

/* Draws n observations from `model`, censored by an independent exponential
 * with the given rate (rate = 0: no censoring). Deterministic in the seed. */
CKSD_API cksd_status cksd_sample_generate(const cksd_model* model, size_t n,
                                          double censor_rate, uint64_t seed,
                                          cksd_sample** out);

/* ------------------------------------------------------------------ */
/* Tests                                                               */

/* Operators: "s" (survival), "m" (martingale), "mu" (martingale on
 * uniform-transformed data), "p" (proportional). */
typedef struct cksd_test_result {
  double statistic;   /* n * V-statistic */
  double p_value;
  int reject;         /* 1 iff p_value < alpha */
  double alpha;
  int n_bootstrap;
  uint64_t seed;
  double bandwidth;   /* bandwidth actually used */
  size_t n;
  size_t n_events;
  char operator_tag[8];
  char warning[256];  /* empty string when no warning was raised */
} cksd_test_result;

/* bandwidth <= 0 requests the median heuristic. threads <= 0 resolves to
 * CKSD_THREADS or the hardware count. */
CKSD_API cksd_status cksd_run_test(const cksd_sample* sample,
                                   const cksd_model* model,
                                   const char* operator_tag, double bandwidth,
                                   double alpha, int n_bootstrap, uint64_t seed,
                                   int threads, cksd_test_result* out);

/* One-sample weighted log-rank baseline; weight is "lr1" (w = 1) or
 * "lr2" (w = number at risk). Two-sided normal p-value. */
CKSD_API cksd_status cksd_logrank(const cksd_sample* sample,
                                  const cksd_model* model, const char* weight,
                                  double* z_out, double* p_out);

/* ------------------------------------------------------------------ */
/* Stein identity check                                                */

/* Default identity-check probe grid: model quantiles 0.1..0.9 with both
 * event indicators (10 probes). Arrays must hold `capacity` entries;
 * *n_out receives the number written. */
CKSD_API cksd_status cksd_default_probes(const cksd_model* model,
                                         double* times, int* events,
                                         size_t capacity, size_t* n_out);

/* Quadrature value of E[h((T,D),(t,d))] for each probe; the null prediction
 * is 0 when data_law is NULL (data drawn from the model itself). Pass
 * n_probes = 0 to use the default 10-point grid (model quantiles
 * 0.1..0.9, both event indicators); in that case deviations may still be
 * filled if non-NULL (capacity >= 10) and *n_used reports the count.
 * bandwidth <= 0 selects 1.0. Operators: s, m, mu. */
CKSD_API cksd_status cksd_identity_check(const cksd_model* model,
                                         const cksd_model* data_law,
                                         const char* operator_tag,
                                         double censor_rate, double bandwidth,
                                         const double* probe_times,
                                         const int* probe_events,
                                         size_t n_probes, double* deviations,
                                         size_t* n_used, double* max_abs_out);

/* ------------------------------------------------------------------ */
/* Power studies                                                       */

typedef struct cksd_power_report cksd_power_report;

/* config_json: experiment description (schema in the README). threads <= 0
 * resolves to CKSD_THREADS or the hardware count. */
CKSD_API cksd_status cksd_power_run(const char* config_json, int threads,
                                    cksd_power_report** out);

/* Built-in preset configurations; returns NULL when the name is unknown.
 * The returned string is static. */
CKSD_API const char* cksd_power_preset(const char* name);

/* Comma-separated list of preset names (static string). */
CKSD_API const char* cksd_power_preset_names(void);

/* Tidy CSV: operator,n,param,censoring,alpha,rejections,reps,rate,se.
 * Owned by the report handle. */
CKSD_API const char* cksd_power_report_csv(const cksd_power_report* report);

CKSD_API void cksd_power_report_free(cksd_power_report* report);

#ifdef __cplusplus
}
#endif

#endif /* CKSD_CKSD_H */
