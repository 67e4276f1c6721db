#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace eventalpha {

// Uppercase ASCII symbol, 1-10 chars, no whitespace. Ordering is
// lexicographic and total.
class Ticker {
public:
    // Uppercases and validates; throws BadTicker.
    static Ticker parse(std::string_view raw);

    const std::string& str() const { return symbol_; }

    auto operator<=>(const Ticker&) const = default;

private:
    explicit Ticker(std::string s) : symbol_(std::move(s)) {}
    std::string symbol_;
};

// Calendar date without time zone. Field order makes the defaulted
// comparison chronological.
struct TradingDate {
    int year = 1970;
    int month = 1;
    int day = 1;

    static TradingDate parse(std::string_view yyyy_mm_dd); // throws BadDate
    static TradingDate from_serial(std::int64_t days_since_epoch);

    std::int64_t serial() const; // days since 1970-01-01
    TradingDate plus_days(int n) const { return from_serial(serial() + n); }
    std::string str() const; // YYYY-MM-DD

    auto operator<=>(const TradingDate&) const = default;
};

// UTC instant, second resolution.
struct UtcInstant {
    std::int64_t epoch_seconds = 0;

    // ISO-8601 with an explicit offset ("Z" or +/-HH:MM); fractional
    // seconds are accepted and truncated. Throws BadTimestamp.
    static UtcInstant parse(std::string_view iso8601);

    std::string str() const; // canonical YYYY-MM-DDTHH:MM:SSZ
    TradingDate utc_date() const;
    int utc_hour() const;

    auto operator<=>(const UtcInstant&) const = default;
};

struct Tweet {
    std::string id;
    UtcInstant timestamp;
    Ticker ticker;
    std::string text; // non-empty after trimming

    bool operator==(const Tweet&) const = default;
};

struct PriceBar {
    TradingDate date;
    Ticker ticker;
    double close = 0; // > 0

    bool operator==(const PriceBar&) const = default;
};

struct EventLabel {
    std::string name;

    auto operator<=>(const EventLabel&) const = default;
};

// Label universe loaded from a taxonomy file: one label per line,
// '#' comments and blank lines ignored.
class Taxonomy {
public:
    static Taxonomy load(const std::string& path);
    static Taxonomy from_labels(std::vector<EventLabel> labels); // rejects duplicates

    bool contains(const EventLabel& label) const;
    void require(const EventLabel& label, const std::string& context) const;

    const std::vector<EventLabel>& labels() const { return ordered_; }
    std::size_t size() const { return ordered_.size(); }

private:
    std::vector<EventLabel> ordered_; // file order
    std::set<EventLabel> index_;
};

struct Annotation {
    std::string tweet_id;
    double tone = 0.0; // clamped to [-1, 1] at construction
    std::set<EventLabel> labels;

    static Annotation make(std::string tweet_id, double tone, std::set<EventLabel> labels);

    bool operator==(const Annotation&) const = default;
};

struct Horizon {
    int days = 1; // >= 1

    static Horizon of(int days); // throws BadHorizon

    auto operator<=>(const Horizon&) const = default;
};

inline const std::vector<Horizon> kDefaultHorizons = {Horizon{1}, Horizon{2}, Horizon{3},
                                                      Horizon{7}};

// One raw corpus record before validation; optional fields are absent
// when the row was short.
struct RawTweetRecord {
    std::optional<std::string> id;
    std::optional<std::string> timestamp;
    std::optional<std::string> ticker;
    std::optional<std::string> text;
    std::size_t line = 0;
};

// Validates and normalizes one corpus record. Errors name the offending
// field and the record's line number: MissingField, EmptyText,
// BadTimestamp, BadTicker.
Tweet validate_tweet(const RawTweetRecord& raw);

// All bars must share one ticker. Returns the series sorted ascending by
// date; throws DuplicateDate / NonPositivePrice / MixedTickers.
std::vector<PriceBar> validate_price_series(std::vector<PriceBar> bars);

} // namespace eventalpha
