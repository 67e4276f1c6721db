#pragma once

#include "core/domain.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eventalpha {

// Mean divided by sample (n-1) standard deviation; not annualized.
// Throws TooFewSamples (n < 2) / ZeroVariance.
double sharpe(std::span<const double> returns);

// Spearman rank correlation with average ranks for ties, computed as the
// Pearson correlation of the rank vectors. Throws TooFewSamples (n < 3) /
// ZeroRankVariance.
double spearman_ic(std::span<const std::pair<double, double>> pairs);

// Fraction of entries where sign(realized) equals the predicted sign;
// zero-return entries match only a 0 prediction. Throws LengthMismatch /
// TooFewSamples.
double win_rate(std::span<const int> predicted_signs, std::span<const double> realized);

// Student's t CDF via the regularized incomplete beta function;
// absolute error <= 1e-8. df >= 1.
double student_t_cdf(double t, std::uint64_t df);

// Two-sided one-sample t-test of mean 0: t = mean / (std / sqrt(n)),
// df = n - 1. Throws ZeroVariance / TooFewSamples.
double t_test_pvalue(double mean, double stddev, std::uint64_t n);

// Same test parameterized by the per-period Sharpe ratio: t = sharpe * sqrt(n).
double t_test_pvalue_from_sharpe(double sharpe_ratio, std::uint64_t n);

// min over t of equity_t / running_peak_t - 1; in [-1, 0].
double max_drawdown(std::span<const double> equity);

// "***" p<0.001, "**" p<0.01, "*" p<0.05, else "".
std::string_view significance_stars(double p_value);

struct MetricsRow {
    EventLabel label;
    std::size_t n = 0;
    double mean_ret = 0;
    double std_ret = 0;
    std::optional<double> ic; // absent when the rank correlation is degenerate
    double sharpe_ratio = 0;
    double p_value = 1;
    std::string stars;
};

enum class IcMode { pooled, daily_mean };

struct IcPair {
    TradingDate date;
    double exposure = 0;
    double fwd_return = 0;
};

// Assembles one table row from an event-study return list and the
// exposure/forward-return pairs backing the IC column.
MetricsRow metrics_row(const EventLabel& label, std::span<const double> samples,
                       std::span<const IcPair> ic_pairs, IcMode mode = IcMode::pooled);

} // namespace eventalpha
