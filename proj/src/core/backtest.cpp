#include "core/backtest.hpp"

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace eventalpha {

PositionMode position_mode_from(const std::string& name) {
    if (name == "raw") return PositionMode::raw;
    if (name == "tone_signed") return PositionMode::tone_signed;
    fail_validation("BadPositionMode",
                    "position mode must be 'raw' or 'tone_signed', got '" + name + "'");
}

const char* position_mode_name(PositionMode mode) {
    return mode == PositionMode::raw ? "raw" : "tone_signed";
}

const char* portfolio_mode_name(PortfolioMode mode) {
    return mode == PortfolioMode::long_short ? "long_short" : "long_only";
}

CompoundMode compound_mode_from(const std::string& name) {
    if (name == "log-sum" || name == "log_sum") return CompoundMode::log_sum;
    if (name == "simple") return CompoundMode::simple;
    fail_validation("BadCompoundMode", "compound mode must be 'log-sum' or 'simple', got '" + name + "'");
}

EventStudyResult event_study(std::span<const EventSample> samples, const EventLabel& label,
                             Horizon h, PositionMode mode) {
    EventStudyResult out;
    for (const EventSample& s : samples) {
        if (!(s.label == label)) continue;
        auto it = s.fwd.find(h.days);
        if (it == s.fwd.end()) continue;
        if (mode == PositionMode::raw) {
            out.returns.push_back(it->second);
        } else {
            if (s.exposure == 0.0) {
                ++out.zero_sign_drops;
                continue;
            }
            out.returns.push_back(s.exposure > 0 ? it->second : -it->second);
        }
    }
    if (out.returns.size() < 2)
        fail_validation("InsufficientSamples",
                        "event study for '" + label.name + "' at " + std::to_string(h.days) +
                            "d has " + std::to_string(out.returns.size()) + " sample(s)");
    return out;
}

namespace {

struct CrossSectionEntry {
    Ticker ticker;
    double exposure;
    std::optional<double> fwd;
};

// Tickers eligible at formation date t: aggregate exposure on the
// previous calendar entry and a price row at t. Sorted ascending by
// (exposure, ticker); fwd may be absent near the series end.
std::vector<CrossSectionEntry> cross_section(
    const std::map<std::pair<Ticker, TradingDate>, double>& aggregate, const PriceMap& prices,
    TradingDate prev, TradingDate formation, Horizon h) {
    std::vector<CrossSectionEntry> entries;
    for (const auto& [key, exposure] : aggregate) {
        if (!(key.second == prev)) continue;
        auto pit = prices.find(key.first);
        if (pit == prices.end()) continue;
        std::span<const PriceBar> series(pit->second);
        auto row = std::lower_bound(
            series.begin(), series.end(), formation,
            [](const PriceBar& b, const TradingDate& d) { return b.date < d; });
        if (row == series.end() || !(row->date == formation)) continue;
        std::optional<double> fwd;
        std::size_t idx = static_cast<std::size_t>(row - series.begin());
        if (idx + static_cast<std::size_t>(h.days) < series.size())
            fwd = std::log(series[idx + static_cast<std::size_t>(h.days)].close / series[idx].close);
        entries.push_back({key.first, exposure, fwd});
    }
    std::sort(entries.begin(), entries.end(), [](const CrossSectionEntry& a, const CrossSectionEntry& b) {
        if (a.exposure != b.exposure) return a.exposure < b.exposure;
        return a.ticker < b.ticker;
    });
    return entries;
}

std::map<std::pair<Ticker, TradingDate>, double> aggregate_exposures(
    const ExposurePanel& panel, const std::optional<EventLabel>& label_filter) {
    std::map<std::pair<Ticker, TradingDate>, double> aggregate;
    for (const auto& [key, cell] : panel.cells()) {
        if (label_filter && !(key.label == *label_filter)) continue;
        aggregate[{key.ticker, key.date}] += cell.exposure;
    }
    return aggregate;
}

std::vector<TradingDate> combined_calendar(const PriceMap& prices) {
    std::set<TradingDate> dates;
    for (const auto& [ticker, bars] : prices)
        for (const PriceBar& b : bars) dates.insert(b.date);
    return {dates.begin(), dates.end()};
}

std::pair<std::size_t, std::size_t> group_bounds(std::size_t n, int q, int g) {
    return {n * static_cast<std::size_t>(g) / static_cast<std::size_t>(q),
            n * static_cast<std::size_t>(g + 1) / static_cast<std::size_t>(q)};
}

std::optional<double> group_mean_fwd(std::span<const CrossSectionEntry> entries, std::size_t lo,
                                     std::size_t hi) {
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t i = lo; i < hi; ++i)
        if (entries[i].fwd) {
            sum += *entries[i].fwd;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

} // namespace

PortfolioSeries portfolio_sort(const ExposurePanel& panel, const PriceMap& prices, Horizon h,
                               int quantiles, PortfolioMode mode,
                               const std::optional<EventLabel>& label_filter, int workers) {
    if (quantiles < 2)
        fail_validation("BadQuantileCount", "quantile count must be >= 2, got " +
                                                std::to_string(quantiles));
    auto aggregate = aggregate_exposures(panel, label_filter);
    auto calendar = combined_calendar(prices);

    PortfolioSeries series;
    series.quantiles = quantiles;
    series.mode = mode;
    series.horizon = h;
    series.label_filter = label_filter;
    series.descriptor = std::string(portfolio_mode_name(mode)) + "_q" + std::to_string(quantiles) +
                        "_h" + std::to_string(h.days);
    if (label_filter) series.descriptor += "_" + label_filter->name;
    if (calendar.size() < 2) return series;

    std::vector<std::optional<PortfolioPoint>> slots(calendar.size() - 1);
    std::vector<char> skipped(calendar.size() - 1, 0);
    parallel_for(calendar.size() - 1, workers, [&](std::size_t k) {
        TradingDate prev = calendar[k];
        TradingDate formation = calendar[k + 1];
        auto entries = cross_section(aggregate, prices, prev, formation, h);
        if (entries.size() < static_cast<std::size_t>(quantiles)) {
            if (!entries.empty()) skipped[k] = 1;
            return;
        }
        auto [blo, bhi] = group_bounds(entries.size(), quantiles, 0);
        auto [tlo, thi] = group_bounds(entries.size(), quantiles, quantiles - 1);
        auto top = group_mean_fwd(entries, tlo, thi);
        if (!top) {
            skipped[k] = 1;
            return;
        }
        if (mode == PortfolioMode::long_only) {
            slots[k] = PortfolioPoint{formation, *top};
            return;
        }
        auto bottom = group_mean_fwd(entries, blo, bhi);
        if (!bottom) {
            skipped[k] = 1;
            return;
        }
        slots[k] = PortfolioPoint{formation, *top - *bottom};
    });
    for (std::size_t k = 0; k < slots.size(); ++k) {
        if (slots[k]) series.points.push_back(*slots[k]);
        if (skipped[k]) ++series.skipped_dates;
    }
    return series;
}

std::vector<std::vector<Ticker>> formation_groups(const ExposurePanel& panel,
                                                  const PriceMap& prices, int quantiles,
                                                  const std::optional<EventLabel>& label_filter,
                                                  TradingDate formation_date) {
    if (quantiles < 2)
        fail_validation("BadQuantileCount", "quantile count must be >= 2");
    auto aggregate = aggregate_exposures(panel, label_filter);
    auto calendar = combined_calendar(prices);
    auto it = std::lower_bound(calendar.begin(), calendar.end(), formation_date);
    if (it == calendar.end() || !(*it == formation_date) || it == calendar.begin())
        return {};
    TradingDate prev = *(it - 1);
    auto entries = cross_section(aggregate, prices, prev, formation_date, Horizon{1});
    if (entries.size() < static_cast<std::size_t>(quantiles)) return {};
    std::vector<std::vector<Ticker>> groups(static_cast<std::size_t>(quantiles));
    for (int g = 0; g < quantiles; ++g) {
        auto [lo, hi] = group_bounds(entries.size(), quantiles, g);
        for (std::size_t i = lo; i < hi; ++i)
            groups[static_cast<std::size_t>(g)].push_back(entries[i].ticker);
    }
    return groups;
}

EquityCurve equity_curve(const PortfolioSeries& series, CompoundMode mode) {
    if (series.points.empty())
        fail_validation("EmptySeries", "equity curve needs a non-empty portfolio series");
    EquityCurve curve;
    curve.mode = mode;
    curve.points.reserve(series.points.size());
    double log_sum = 0;
    double product = 1;
    for (const PortfolioPoint& p : series.points) {
        double equity;
        if (mode == CompoundMode::log_sum) {
            log_sum += p.ret;
            equity = std::exp(log_sum);
        } else {
            if (p.ret <= -1.0)
                fail_validation("SimpleModeReturnBelowNeg100Pct",
                                "simple compounding undefined for return " + fmt_double(p.ret) +
                                    " on " + p.date.str());
            product *= 1.0 + p.ret;
            equity = product;
        }
        curve.points.push_back(EquityPoint{p.date, equity});
    }
    return curve;
}

std::vector<double> EquityCurve::values() const {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p.equity);
    return v;
}

std::string series_to_csv(std::span<const PortfolioPoint> points) {
    std::ostringstream out;
    out << "date,value\n";
    for (const auto& p : points) {
        std::vector<std::string> row = {p.date.str(), fmt_double(p.ret)};
        write_csv_row(out, row);
    }
    return out.str();
}

std::string equity_to_csv(const EquityCurve& curve) {
    std::ostringstream out;
    out << "date,value\n";
    for (const auto& p : curve.points) {
        std::vector<std::string> row = {p.date.str(), fmt_double(p.equity)};
        write_csv_row(out, row);
    }
    return out.str();
}

} // namespace eventalpha
