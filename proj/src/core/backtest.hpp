#pragma once

#include "core/domain.hpp"
#include "core/factor.hpp"
#include "core/ingest.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eventalpha {

enum class PositionMode { raw, tone_signed };

PositionMode position_mode_from(const std::string& name);
const char* position_mode_name(PositionMode mode);

struct EventStudyResult {
    std::vector<double> returns;
    std::size_t zero_sign_drops = 0; // tone_signed samples with sign(exposure) == 0
};

// Per-event forward returns of one label at one horizon. raw passes
// fwd[h] through; tone_signed flips by sign(exposure) and drops
// zero-sign samples. Throws InsufficientSamples when fewer than 2
// samples carry the horizon.
EventStudyResult event_study(std::span<const EventSample> samples, const EventLabel& label,
                             Horizon h, PositionMode mode);

enum class PortfolioMode { long_short, long_only };

const char* portfolio_mode_name(PortfolioMode mode);

struct PortfolioPoint {
    TradingDate date;
    double ret = 0;
};

struct PortfolioSeries {
    std::vector<PortfolioPoint> points; // dates strictly increasing
    std::string descriptor;             // e.g. "long_short_q10_h1"
    int quantiles = 0;
    PortfolioMode mode = PortfolioMode::long_short;
    Horizon horizon{1};
    std::optional<EventLabel> label_filter;
    std::size_t skipped_dates = 0; // formation dates with < q exposed tickers
};

// Rank-sorted quantile portfolio: on each trading date t of the combined
// price calendar, tickers are ranked by their aggregate exposure on the
// previous trading date (ties broken by ticker order) and split into q
// groups; returns are group means of the h-day forward log return from t.
PortfolioSeries portfolio_sort(const ExposurePanel& panel, const PriceMap& prices, Horizon h,
                               int quantiles, PortfolioMode mode,
                               const std::optional<EventLabel>& label_filter = {},
                               int workers = 1);

// Group membership for one formation date, exposed for the look-ahead
// property checks. Groups are ordered bottom to top; empty when the date
// is skipped.
std::vector<std::vector<Ticker>> formation_groups(const ExposurePanel& panel,
                                                  const PriceMap& prices, int quantiles,
                                                  const std::optional<EventLabel>& label_filter,
                                                  TradingDate formation_date);

enum class CompoundMode { log_sum, simple };

CompoundMode compound_mode_from(const std::string& name);

struct EquityPoint {
    TradingDate date;
    double equity = 1.0;
};

// Cumulative equity on an initial 1.0, one point per series entry.
struct EquityCurve {
    std::vector<EquityPoint> points;
    CompoundMode mode = CompoundMode::log_sum;

    std::vector<double> values() const;
};

// log_sum treats entries as log returns: equity_t = exp(sum); simple
// compounds (1 + r) and rejects returns <= -100%.
EquityCurve equity_curve(const PortfolioSeries& series, CompoundMode mode);

std::string series_to_csv(std::span<const PortfolioPoint> points);  // date,value
std::string equity_to_csv(const EquityCurve& curve);                // date,value

} // namespace eventalpha
