#pragma once

#include "core/domain.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace eventalpha {

struct ReturnEntry {
    TradingDate date;
    double log_return = 0;
};

// Daily log returns for one ticker; one entry per price bar after the
// first, dates strictly increasing.
struct ReturnSeries {
    Ticker ticker;
    std::vector<ReturnEntry> entries;
};

struct AlignedTweet {
    Tweet tweet;
    TradingDate trading_date;
};

enum class IngestMode { strict, lenient };

struct TweetLoadResult {
    std::vector<Tweet> tweets;
    std::size_t rows_read = 0;
    std::size_t dropped = 0;              // lenient mode only
    std::vector<std::string> row_errors;  // one message per invalid row
};

// CSV with header `id,timestamp,ticker,text`. Strict mode aborts if any
// row is invalid; lenient mode drops invalid rows and counts them.
// Duplicate ids are invalid rows.
TweetLoadResult load_tweets(const std::string& path, IngestMode mode);

using PriceMap = std::map<Ticker, std::vector<PriceBar>>;

// CSV with header `date,ticker,close[,volume]`; the volume column is
// ignored. Every per-ticker series passes validate_price_series.
PriceMap load_prices(const std::string& path);

// Entry for date t is ln(close_t / close_{t-1}); the first bar has none.
// Throws SeriesTooShort when fewer than 2 bars.
ReturnSeries compute_log_returns(std::span<const PriceBar> series);

// ln(close_{t+h} / close_t) where t+h means h rows after t in the series;
// nullopt when fewer than h rows remain. Throws DateNotFound when t is
// not a row of the series.
std::optional<double> forward_return(std::span<const PriceBar> series, TradingDate t, Horizon h);

// Maps each tweet to its UTC calendar date; timestamps at or after
// cutoff_hour roll to the next day (24 disables the cutoff). Preserves
// input order.
std::vector<AlignedTweet> align_tweets(std::span<const Tweet> tweets, int cutoff_hour = 24);

// Serialization counterparts used by the pipeline stages; canonical
// formatting (shortest round-trip numbers, Z-suffixed timestamps).
std::string tweets_to_csv(std::span<const Tweet> tweets);
std::string prices_to_csv(const PriceMap& prices);

} // namespace eventalpha
