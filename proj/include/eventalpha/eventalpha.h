/*
 * eventalpha C API
 *
 * Event-labeled tweet-sentiment factor research pipeline: ingestion,
 * annotation, cross-sectional exposure construction, backtests, and
 * metrics reporting, driven by a JSON run configuration.
 *
 * All functions return ea_status; on failure ea_last_error() holds a
 * thread-local human-readable message. Handles are opaque and owned by
 * the caller via the matching *_destroy function.
 */

#ifndef EVENTALPHA_EVENTALPHA_H
#define EVENTALPHA_EVENTALPHA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EA_API __declspec(dllexport)
#else
#define EA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ea_status {
    EA_OK = 0,
    EA_ERR_VALIDATION = 1, /* bad input data or configuration */
    EA_ERR_IO = 2,         /* file system failure */
    EA_ERR_UPSTREAM = 3,   /* annotation service failure */
    EA_ERR_INVALID_ARG = 4 /* null pointer or out-of-domain argument */
} ea_status;

EA_API const char* ea_version(void);

/* Message for the most recent failing call on this thread. */
EA_API const char* ea_last_error(void);

/* 0=error 1=warn 2=info 3=debug; diagnostics go to stderr. */
EA_API void ea_set_log_level(int level);

/* ---- pipeline runs ------------------------------------------------- */

/* An ea_run binds one JSON configuration; stages write their outputs
 * under <out>/<stage>/ and are independently re-runnable. */
typedef struct ea_run ea_run;

EA_API ea_status ea_run_create(const char* config_json, ea_run** out_run);
EA_API ea_status ea_run_create_from_file(const char* config_path, ea_run** out_run);

/* Overrides the configured output directory. */
EA_API ea_status ea_run_set_out_dir(ea_run* run, const char* out_dir);

/* stage: "synth" | "ingest" | "annotate" | "factors" | "backtest" | "report" */
EA_API ea_status ea_run_stage(ea_run* run, const char* stage);

/* Manifest JSON of the most recent successful stage; owned by the run,
 * valid until the next ea_run_stage call. NULL before any stage ran. */
EA_API const char* ea_run_last_summary_json(const ea_run* run);

EA_API void ea_run_destroy(ea_run* run);

/* ---- statistics ----------------------------------------------------- */

/* Mean / sample standard deviation (n-1); not annualized. */
EA_API ea_status ea_sharpe(const double* returns, size_t n, double* out);

/* Spearman rank correlation (average ranks on ties). */
EA_API ea_status ea_spearman_ic(const double* exposures, const double* fwd_returns, size_t n,
                                double* out);

/* Fraction of entries whose realized sign matches the predicted sign in
 * {-1, 0, +1}; zero returns match only a 0 prediction. */
EA_API ea_status ea_win_rate(const int* predicted_signs, const double* realized, size_t n,
                             double* out);

/* Student's t CDF, absolute error <= 1e-8. */
EA_API ea_status ea_student_t_cdf(double t, uint64_t df, double* out);

/* Two-sided one-sample t-test of mean 0 with df = n - 1. */
EA_API ea_status ea_t_test_pvalue(double mean, double stddev, uint64_t n, double* out);
EA_API ea_status ea_t_test_pvalue_from_sharpe(double sharpe_ratio, uint64_t n, double* out);

/* min over t of equity_t / running_peak_t - 1. */
EA_API ea_status ea_max_drawdown(const double* equity, size_t n, double* out);

/* "***" p<0.001, "**" p<0.01, "*" p<0.05, else ""; static storage. */
EA_API const char* ea_significance_stars(double p_value);

#ifdef __cplusplus
}
#endif

#endif /* EVENTALPHA_EVENTALPHA_H */
