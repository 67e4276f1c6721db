#include "core/ingest.hpp"

#include "core/csv.hpp"
#include "core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace eventalpha {

namespace {

void check_header(const CsvRecord& header, std::initializer_list<const char*> required,
                  std::size_t optional_tail, const std::string& path) {
    std::size_t n = required.size();
    if (header.fields.size() < n || header.fields.size() > n + optional_tail)
        fail_validation("BadHeader", path + ": unexpected column count in header");
    std::size_t i = 0;
    for (const char* name : required) {
        if (to_lower(trim(header.fields[i])) != name)
            fail_validation("BadHeader", path + ": expected column '" + name + "' at position " +
                                             std::to_string(i + 1) + ", got '" +
                                             header.fields[i] + "'");
        ++i;
    }
}

} // namespace

TweetLoadResult load_tweets(const std::string& path, IngestMode mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("IoError", "cannot open tweet corpus: " + path);
    CsvReader reader(in);
    auto header = reader.next();
    if (!header) fail_validation("BadHeader", path + ": empty file");
    check_header(*header, {"id", "timestamp", "ticker", "text"}, 0, path);

    TweetLoadResult result;
    std::set<std::string> seen_ids;
    while (auto rec = reader.next()) {
        if (rec->fields.size() == 1 && trim(rec->fields[0]).empty()) continue; // trailing blank
        ++result.rows_read;
        RawTweetRecord raw;
        raw.line = rec->line;
        auto get = [&](std::size_t i) -> std::optional<std::string> {
            if (i < rec->fields.size()) return rec->fields[i];
            return std::nullopt;
        };
        raw.id = get(0);
        raw.timestamp = get(1);
        raw.ticker = get(2);
        raw.text = get(3);
        try {
            if (rec->fields.size() > 4)
                fail_validation("BadRow", "too many fields at line " + std::to_string(rec->line));
            Tweet tweet = validate_tweet(raw);
            if (!seen_ids.insert(tweet.id).second)
                fail_validation("DuplicateId", "duplicate tweet id '" + tweet.id + "' at line " +
                                                   std::to_string(rec->line));
            result.tweets.push_back(std::move(tweet));
        } catch (const Error& e) {
            result.row_errors.push_back(e.what());
            ++result.dropped;
        }
    }
    if (!result.row_errors.empty() && mode == IngestMode::strict) {
        std::ostringstream msg;
        msg << path << ": " << result.row_errors.size() << " invalid row(s); first: "
            << result.row_errors.front();
        fail_validation("InvalidRows", msg.str());
    }
    return result;
}

PriceMap load_prices(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("IoError", "cannot open price file: " + path);
    CsvReader reader(in);
    auto header = reader.next();
    if (!header) fail_validation("BadHeader", path + ": empty file");
    check_header(*header, {"date", "ticker", "close"}, 1, path);
    if (header->fields.size() == 4 && to_lower(trim(header->fields[3])) != "volume")
        fail_validation("BadHeader", path + ": optional fourth column must be 'volume'");

    std::map<Ticker, std::vector<PriceBar>> by_ticker;
    while (auto rec = reader.next()) {
        if (rec->fields.size() == 1 && trim(rec->fields[0]).empty()) continue;
        if (rec->fields.size() < 3 || rec->fields.size() > 4)
            fail_validation("BadRow",
                            path + ": wrong field count at line " + std::to_string(rec->line));
        TradingDate date = TradingDate::parse(trim(rec->fields[0]));
        Ticker ticker = Ticker::parse(trim(rec->fields[1]));
        double close = parse_double_strict(rec->fields[2], path, rec->line);
        by_ticker[ticker].push_back(PriceBar{date, ticker, close});
    }
    PriceMap out;
    for (auto& [ticker, bars] : by_ticker) out.emplace(ticker, validate_price_series(std::move(bars)));
    return out;
}

ReturnSeries compute_log_returns(std::span<const PriceBar> series) {
    if (series.size() < 2)
        fail_validation("SeriesTooShort", "need at least 2 price bars, got " +
                                              std::to_string(series.size()));
    ReturnSeries out{series.front().ticker, {}};
    out.entries.reserve(series.size() - 1);
    for (std::size_t i = 1; i < series.size(); ++i)
        out.entries.push_back({series[i].date, std::log(series[i].close / series[i - 1].close)});
    return out;
}

std::optional<double> forward_return(std::span<const PriceBar> series, TradingDate t, Horizon h) {
    auto it = std::lower_bound(series.begin(), series.end(), t,
                               [](const PriceBar& b, const TradingDate& d) { return b.date < d; });
    if (it == series.end() || !(it->date == t))
        fail_validation("DateNotFound", "date " + t.str() + " not in price series");
    std::size_t idx = static_cast<std::size_t>(it - series.begin());
    if (idx + static_cast<std::size_t>(h.days) >= series.size()) return std::nullopt;
    return std::log(series[idx + static_cast<std::size_t>(h.days)].close / series[idx].close);
}

std::vector<AlignedTweet> align_tweets(std::span<const Tweet> tweets, int cutoff_hour) {
    std::vector<AlignedTweet> out;
    out.reserve(tweets.size());
    for (const Tweet& tw : tweets) {
        TradingDate d = tw.timestamp.utc_date();
        if (cutoff_hour >= 0 && cutoff_hour < 24 && tw.timestamp.utc_hour() >= cutoff_hour)
            d = d.plus_days(1);
        out.push_back(AlignedTweet{tw, d});
    }
    return out;
}

std::string tweets_to_csv(std::span<const Tweet> tweets) {
    std::ostringstream out;
    out << "id,timestamp,ticker,text\n";
    for (const Tweet& t : tweets) {
        std::vector<std::string> row = {t.id, t.timestamp.str(), t.ticker.str(), t.text};
        write_csv_row(out, row);
    }
    return out.str();
}

std::string prices_to_csv(const PriceMap& prices) {
    std::ostringstream out;
    out << "date,ticker,close\n";
    for (const auto& [ticker, bars] : prices)
        for (const PriceBar& b : bars) {
            std::vector<std::string> row = {b.date.str(), ticker.str(), fmt_double(b.close)};
            write_csv_row(out, row);
        }
    return out.str();
}

} // namespace eventalpha
