#include "core/factor.hpp"

#include "core/csv.hpp"
#include "core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace eventalpha {

AttributionMode attribution_mode_from(const std::string& name) {
    if (name == "duplicate") return AttributionMode::duplicate;
    if (name == "proportional") return AttributionMode::proportional;
    fail_validation("BadAttributionMode",
                    "attribution mode must be 'duplicate' or 'proportional', got '" + name + "'");
}

const char* attribution_mode_name(AttributionMode mode) {
    return mode == AttributionMode::duplicate ? "duplicate" : "proportional";
}

std::string ExposurePanel::to_csv() const {
    std::ostringstream out;
    out << "ticker,date,label,exposure,tweet_count\n";
    for (const auto& [key, cell] : cells_) {
        std::vector<std::string> row = {key.ticker.str(), key.date.str(), key.label.name,
                                        fmt_double(cell.exposure), std::to_string(cell.tweet_count)};
        write_csv_row(out, row);
    }
    return out.str();
}

ExposurePanel ExposurePanel::from_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("IoError", "cannot open panel file: " + path);
    CsvReader reader(in);
    auto header = reader.next();
    if (!header || header->fields.size() != 5)
        fail_validation("BadHeader", path + ": expected ticker,date,label,exposure,tweet_count");
    ExposurePanel panel;
    while (auto rec = reader.next()) {
        if (rec->fields.size() == 1 && trim(rec->fields[0]).empty()) continue;
        if (rec->fields.size() != 5)
            fail_validation("BadRow", path + ": wrong field count at line " + std::to_string(rec->line));
        PanelKey key{Ticker::parse(trim(rec->fields[0])), TradingDate::parse(trim(rec->fields[1])),
                     EventLabel{rec->fields[2]}};
        PanelCell cell{parse_double_strict(rec->fields[3], path, rec->line),
                       static_cast<std::uint32_t>(parse_int_strict(rec->fields[4], path, rec->line))};
        if (!panel.cells_.emplace(std::move(key), cell).second)
            fail_validation("DuplicateKey", path + ": duplicate panel key at line " +
                                                std::to_string(rec->line));
    }
    return panel;
}

ExposurePanel build_exposures(std::span<const PanelInput> inputs, AttributionMode mode,
                              double intensity_threshold, BuildStats* stats) {
    BuildStats local;
    // Collect contributions per key, then sum in tweet-id order so the
    // result is independent of input order.
    std::map<PanelKey, std::vector<std::pair<std::string, double>>> contributions;
    for (const PanelInput& in : inputs) {
        if (in.labels.empty()) {
            ++local.unlabeled;
            continue;
        }
        if (std::fabs(in.tone) < intensity_threshold) {
            ++local.below_intensity;
            continue;
        }
        double share = mode == AttributionMode::proportional
                           ? in.tone / static_cast<double>(in.labels.size())
                           : in.tone;
        for (const EventLabel& label : in.labels)
            contributions[PanelKey{in.ticker, in.date, label}].emplace_back(in.tweet_id, share);
    }
    ExposurePanel panel;
    for (auto& [key, list] : contributions) {
        std::sort(list.begin(), list.end());
        PanelCell cell;
        for (const auto& [id, share] : list) {
            cell.exposure += share;
            ++cell.tweet_count;
        }
        if (!std::isfinite(cell.exposure))
            fail_validation("BadExposure", "non-finite exposure for " + key.ticker.str() + " " +
                                               key.date.str() + " " + key.label.name);
        panel.cells().emplace(key, cell);
    }
    if (stats) *stats = local;
    return panel;
}

ExposurePanel build_exposures(std::span<const std::pair<AlignedTweet, Annotation>> annotated,
                              AttributionMode mode, double intensity_threshold, BuildStats* stats) {
    std::vector<PanelInput> inputs;
    inputs.reserve(annotated.size());
    for (const auto& [aligned, ann] : annotated)
        inputs.push_back(PanelInput{aligned.tweet.id, aligned.tweet.ticker, aligned.trading_date,
                                    ann.tone, ann.labels});
    return build_exposures(inputs, mode, intensity_threshold, stats);
}

SampleJoin event_samples(const ExposurePanel& panel, const PriceMap& prices,
                         std::span<const Horizon> horizons) {
    SampleJoin out;
    for (const auto& [key, cell] : panel.cells()) {
        auto it = prices.find(key.ticker);
        if (it == prices.end()) {
            ++out.join_misses;
            continue;
        }
        std::span<const PriceBar> series(it->second);
        auto row = std::lower_bound(
            series.begin(), series.end(), key.date,
            [](const PriceBar& b, const TradingDate& d) { return b.date < d; });
        if (row == series.end() || !(row->date == key.date)) {
            ++out.join_misses;
            continue;
        }
        EventSample sample{key.ticker, key.date, key.label, cell.exposure, cell.tweet_count, {}};
        for (Horizon h : horizons)
            if (auto r = forward_return(series, key.date, h)) sample.fwd[h.days] = *r;
        // Without a next-day return the event contributes to no horizon's
        // table; drop it so sample counts stay consistent.
        if (!forward_return(series, key.date, Horizon{1})) {
            ++out.join_misses;
            continue;
        }
        out.samples.push_back(std::move(sample));
    }
    return out;
}

} // namespace eventalpha
