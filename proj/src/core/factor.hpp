#pragma once

#include "core/domain.hpp"
#include "core/ingest.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eventalpha {

// How a multi-label tweet's tone is distributed across its labels.
enum class AttributionMode { duplicate, proportional };

AttributionMode attribution_mode_from(const std::string& name);
const char* attribution_mode_name(AttributionMode mode);

struct PanelKey {
    Ticker ticker;
    TradingDate date;
    EventLabel label;

    auto operator<=>(const PanelKey&) const = default;
};

struct PanelCell {
    double exposure = 0;
    std::uint32_t tweet_count = 0;

    bool operator==(const PanelCell&) const = default;
};

// Signed exposure per (ticker, date, label). Keys without contributing
// tweets are never stored; map iteration gives the deterministic
// (ticker, date, label) order.
class ExposurePanel {
public:
    using Map = std::map<PanelKey, PanelCell>;

    const Map& cells() const { return cells_; }
    Map& cells() { return cells_; }
    std::size_t size() const { return cells_.size(); }

    std::string to_csv() const; // ticker,date,label,exposure,tweet_count
    static ExposurePanel from_csv(const std::string& path);

private:
    Map cells_;
};

// Minimal row for panel construction.
struct PanelInput {
    std::string tweet_id;
    Ticker ticker;
    TradingDate date;
    double tone = 0;
    std::set<EventLabel> labels;
};

struct BuildStats {
    std::size_t unlabeled = 0;          // tweets with no labels
    std::size_t below_intensity = 0;    // filtered by the |tone| threshold
};

// Per-key summation runs in tweet-id order, so the panel is
// bit-identical under any permutation of the input.
ExposurePanel build_exposures(std::span<const PanelInput> inputs, AttributionMode mode,
                              double intensity_threshold = 0.0, BuildStats* stats = nullptr);

ExposurePanel build_exposures(std::span<const std::pair<AlignedTweet, Annotation>> annotated,
                              AttributionMode mode, double intensity_threshold = 0.0,
                              BuildStats* stats = nullptr);

// One row of the per-event study: a panel key joined with its forward
// returns per horizon (absent where the series ends).
struct EventSample {
    Ticker ticker;
    TradingDate date;
    EventLabel label;
    double exposure = 0;
    std::uint32_t tweet_count = 0;
    std::map<int, double> fwd; // horizon days -> log return
};

struct SampleJoin {
    std::vector<EventSample> samples;
    std::size_t join_misses = 0; // keys without a usable 1-day forward return
};

// Joins panel keys with forward returns. Keys whose ticker lacks price
// data, whose date is not a price row, or with no 1-day forward return
// are dropped and counted.
SampleJoin event_samples(const ExposurePanel& panel, const PriceMap& prices,
                         std::span<const Horizon> horizons);

} // namespace eventalpha
