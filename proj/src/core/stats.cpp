#include "core/stats.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace eventalpha {

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v, double mean) {
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> v) {
    std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

// Continued-fraction evaluation for the regularized incomplete beta
// function (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 400;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                   b * std::log1p(-x);
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// P(|T| > |t|) for df degrees of freedom; exactly the two-sided p-value.
double t_two_sided_tail(double t, std::uint64_t df) {
    double d = static_cast<double>(df);
    double x = d / (d + t * t);
    return reg_inc_beta(d / 2.0, 0.5, x);
}

} // namespace

double sharpe(std::span<const double> returns) {
    if (returns.size() < 2)
        fail_validation("TooFewSamples",
                        "sharpe needs n >= 2, got " + std::to_string(returns.size()));
    double m = mean_of(returns);
    double s = sample_std(returns, m);
    if (s == 0.0) fail_validation("ZeroVariance", "sharpe undefined: zero sample variance");
    return m / s;
}

double spearman_ic(std::span<const std::pair<double, double>> pairs) {
    std::size_t n = pairs.size();
    if (n < 3)
        fail_validation("TooFewSamples", "spearman needs n >= 3, got " + std::to_string(n));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = pairs[i].first;
        y[i] = pairs[i].second;
    }
    std::vector<double> rx = average_ranks(x);
    std::vector<double> ry = average_ranks(y);
    double mx = mean_of(rx), my = mean_of(ry);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        fail_validation("ZeroRankVariance", "spearman undefined: a coordinate is fully tied");
    return sxy / std::sqrt(sxx * syy);
}

double win_rate(std::span<const int> predicted_signs, std::span<const double> realized) {
    if (predicted_signs.size() != realized.size())
        fail_validation("LengthMismatch", "predicted and realized lengths differ: " +
                                              std::to_string(predicted_signs.size()) + " vs " +
                                              std::to_string(realized.size()));
    if (predicted_signs.empty())
        fail_validation("TooFewSamples", "win_rate needs n >= 1");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < realized.size(); ++i) {
        int realized_sign = realized[i] > 0 ? 1 : (realized[i] < 0 ? -1 : 0);
        if (realized_sign == predicted_signs[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(realized.size());
}

double student_t_cdf(double t, std::uint64_t df) {
    if (df < 1) fail_validation("BadDegreesOfFreedom", "df must be >= 1");
    if (t == 0.0) return 0.5;
    double tail = 0.5 * t_two_sided_tail(t, df);
    return t > 0.0 ? 1.0 - tail : tail;
}

double t_test_pvalue(double mean, double stddev, std::uint64_t n) {
    if (n < 2) fail_validation("TooFewSamples", "t-test needs n >= 2");
    if (!(stddev > 0)) fail_validation("ZeroVariance", "t-test undefined: std <= 0");
    return t_test_pvalue_from_sharpe(mean / stddev, n);
}

double t_test_pvalue_from_sharpe(double sharpe_ratio, std::uint64_t n) {
    if (n < 2) fail_validation("TooFewSamples", "t-test needs n >= 2");
    double t = sharpe_ratio * std::sqrt(static_cast<double>(n));
    double p = t_two_sided_tail(t, n - 1);
    return std::clamp(p, 5e-324, 1.0);
}

double max_drawdown(std::span<const double> equity) {
    if (equity.empty()) fail_validation("EmptyCurve", "max_drawdown needs a non-empty curve");
    double peak = equity.front();
    double worst = 0.0;
    for (double e : equity) {
        peak = std::max(peak, e);
        worst = std::min(worst, e / peak - 1.0);
    }
    return worst;
}

std::string_view significance_stars(double p_value) {
    if (p_value < 0.001) return "***";
    if (p_value < 0.01) return "**";
    if (p_value < 0.05) return "*";
    return "";
}

MetricsRow metrics_row(const EventLabel& label, std::span<const double> samples,
                       std::span<const IcPair> ic_pairs, IcMode mode) {
    MetricsRow row;
    row.label = label;
    row.n = samples.size();
    if (samples.size() < 2)
        fail_validation("TooFewSamples", "metrics row for '" + label.name + "' needs n >= 2");
    row.mean_ret = mean_of(samples);
    row.std_ret = sample_std(samples, row.mean_ret);
    if (row.std_ret == 0.0)
        fail_validation("ZeroVariance", "metrics row for '" + label.name + "': zero variance");
    row.sharpe_ratio = row.mean_ret / row.std_ret;
    row.p_value = t_test_pvalue_from_sharpe(row.sharpe_ratio, row.n);
    row.stars = std::string(significance_stars(row.p_value));

    auto pooled_ic = [](std::span<const IcPair> ps) -> std::optional<double> {
        std::vector<std::pair<double, double>> flat;
        flat.reserve(ps.size());
        for (const auto& p : ps) flat.emplace_back(p.exposure, p.fwd_return);
        try {
            return spearman_ic(flat);
        } catch (const Error&) {
            return std::nullopt; // degenerate: exported as NA
        }
    };

    if (mode == IcMode::pooled) {
        row.ic = pooled_ic(ic_pairs);
    } else {
        std::map<TradingDate, std::vector<IcPair>> by_date;
        for (const auto& p : ic_pairs) by_date[p.date].push_back(p);
        double sum = 0;
        std::size_t days = 0;
        for (const auto& [date, ps] : by_date) {
            auto ic = pooled_ic(ps);
            if (ic) {
                sum += *ic;
                ++days;
            }
        }
        if (days > 0) row.ic = sum / static_cast<double>(days);
    }
    return row;
}

} // namespace eventalpha
