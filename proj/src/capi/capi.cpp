#include "eventalpha/eventalpha.h"

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/log.hpp"
#include "core/pipeline.hpp"
#include "core/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace {

thread_local std::string g_last_error;

ea_status capture(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const eventalpha::Error& err) {
        g_last_error = std::string(err.kind()) + ": " + err.what();
        switch (err.cls()) {
            case eventalpha::ErrClass::validation: return EA_ERR_VALIDATION;
            case eventalpha::ErrClass::io: return EA_ERR_IO;
            case eventalpha::ErrClass::upstream: return EA_ERR_UPSTREAM;
        }
        return EA_ERR_VALIDATION;
    } catch (const std::exception& ex) {
        g_last_error = ex.what();
        return EA_ERR_VALIDATION;
    } catch (...) {
        g_last_error = "unknown error";
        return EA_ERR_VALIDATION;
    }
}

template <class Fn>
ea_status guarded(Fn&& fn) {
    try {
        fn();
        return EA_OK;
    } catch (...) {
        return capture(std::current_exception());
    }
}

ea_status require_args(bool ok) {
    if (ok) return EA_OK;
    g_last_error = "null pointer or invalid argument";
    return EA_ERR_INVALID_ARG;
}

} // namespace

struct ea_run {
    eventalpha::RunConfig config;
    std::string last_summary;
    bool has_summary = false;
};

extern "C" {

const char* ea_version(void) { return "0.1.0"; }

const char* ea_last_error(void) { return g_last_error.c_str(); }

void ea_set_log_level(int level) {
    level = std::clamp(level, 0, 3);
    eventalpha::set_log_level(static_cast<eventalpha::LogLevel>(level));
}

ea_status ea_run_create(const char* config_json, ea_run** out_run) {
    if (auto st = require_args(config_json && out_run); st != EA_OK) return st;
    *out_run = nullptr;
    return guarded([&] {
        auto run = std::make_unique<ea_run>();
        run->config = eventalpha::RunConfig::from_json_text(config_json);
        *out_run = run.release();
    });
}

ea_status ea_run_create_from_file(const char* config_path, ea_run** out_run) {
    if (auto st = require_args(config_path && out_run); st != EA_OK) return st;
    *out_run = nullptr;
    return guarded([&] {
        auto run = std::make_unique<ea_run>();
        run->config = eventalpha::RunConfig::from_file(config_path);
        *out_run = run.release();
    });
}

ea_status ea_run_set_out_dir(ea_run* run, const char* out_dir) {
    if (auto st = require_args(run && out_dir && *out_dir); st != EA_OK) return st;
    run->config.out_dir = out_dir;
    return EA_OK;
}

ea_status ea_run_stage(ea_run* run, const char* stage) {
    if (auto st = require_args(run && stage); st != EA_OK) return st;
    return guarded([&] {
        eventalpha::Pipeline pipeline(run->config);
        nlohmann::json manifest = pipeline.run_stage(stage);
        run->last_summary = manifest.dump();
        run->has_summary = true;
    });
}

const char* ea_run_last_summary_json(const ea_run* run) {
    if (!run || !run->has_summary) return nullptr;
    return run->last_summary.c_str();
}

void ea_run_destroy(ea_run* run) { delete run; }

ea_status ea_sharpe(const double* returns, size_t n, double* out) {
    if (auto st = require_args(returns != nullptr && out != nullptr); st != EA_OK) return st;
    return guarded([&] { *out = eventalpha::sharpe(std::span(returns, n)); });
}

ea_status ea_spearman_ic(const double* exposures, const double* fwd_returns, size_t n,
                         double* out) {
    if (auto st = require_args(exposures && fwd_returns && out); st != EA_OK) return st;
    return guarded([&] {
        std::vector<std::pair<double, double>> pairs(n);
        for (size_t i = 0; i < n; ++i) pairs[i] = {exposures[i], fwd_returns[i]};
        *out = eventalpha::spearman_ic(pairs);
    });
}

ea_status ea_win_rate(const int* predicted_signs, const double* realized, size_t n, double* out) {
    if (auto st = require_args(predicted_signs && realized && out); st != EA_OK) return st;
    return guarded([&] {
        *out = eventalpha::win_rate(std::span(predicted_signs, n), std::span(realized, n));
    });
}

ea_status ea_student_t_cdf(double t, uint64_t df, double* out) {
    if (auto st = require_args(out != nullptr); st != EA_OK) return st;
    return guarded([&] { *out = eventalpha::student_t_cdf(t, df); });
}

ea_status ea_t_test_pvalue(double mean, double stddev, uint64_t n, double* out) {
    if (auto st = require_args(out != nullptr); st != EA_OK) return st;
    return guarded([&] { *out = eventalpha::t_test_pvalue(mean, stddev, n); });
}

ea_status ea_t_test_pvalue_from_sharpe(double sharpe_ratio, uint64_t n, double* out) {
    if (auto st = require_args(out != nullptr); st != EA_OK) return st;
    return guarded([&] { *out = eventalpha::t_test_pvalue_from_sharpe(sharpe_ratio, n); });
}

ea_status ea_max_drawdown(const double* equity, size_t n, double* out) {
    if (auto st = require_args(equity && out); st != EA_OK) return st;
    return guarded([&] { *out = eventalpha::max_drawdown(std::span(equity, n)); });
}

const char* ea_significance_stars(double p_value) {
    auto sv = eventalpha::significance_stars(p_value);
    if (sv == "***") return "***";
    if (sv == "**") return "**";
    if (sv == "*") return "*";
    return "";
}

} // extern "C"
