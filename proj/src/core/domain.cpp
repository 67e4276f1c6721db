#include "core/domain.hpp"

#include "core/csv.hpp"
#include "core/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace eventalpha {

namespace {

bool is_ascii_printable_nonspace(char c) {
    auto u = static_cast<unsigned char>(c);
    return u > 0x20 && u < 0x7F;
}

// Days since 1970-01-01 for a civil date (Gregorian, proleptic).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yy + (m <= 2));
}

int days_in_month(int y, int m) {
    static const int dim[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return dim[m - 1];
}

bool parse_uint(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

} // namespace

Ticker Ticker::parse(std::string_view raw) {
    std::string sym = to_upper(raw);
    if (sym.empty() || sym.size() > 10)
        fail_validation("BadTicker", "ticker must be 1-10 characters, got '" + std::string(raw) + "'");
    for (char c : sym)
        if (!is_ascii_printable_nonspace(c))
            fail_validation("BadTicker", "ticker contains whitespace or non-ASCII: '" +
                                             std::string(raw) + "'");
    return Ticker(std::move(sym));
}

TradingDate TradingDate::parse(std::string_view s) {
    int y = 0, m = 0, d = 0;
    bool ok = s.size() == 10 && s[4] == '-' && s[7] == '-' && parse_uint(s, 0, 4, y) &&
              parse_uint(s, 5, 2, m) && parse_uint(s, 8, 2, d);
    if (!ok || m < 1 || m > 12 || d < 1 || d > days_in_month(y, m))
        fail_validation("BadDate", "invalid date '" + std::string(s) + "' (expected YYYY-MM-DD)");
    return TradingDate{y, m, d};
}

TradingDate TradingDate::from_serial(std::int64_t days) {
    TradingDate out;
    civil_from_days(days, out.year, out.month, out.day);
    return out;
}

std::int64_t TradingDate::serial() const { return days_from_civil(year, month, day); }

std::string TradingDate::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

UtcInstant UtcInstant::parse(std::string_view s) {
    auto bad = [&]() -> UtcInstant {
        fail_validation("BadTimestamp",
                        "invalid timestamp '" + std::string(s) +
                            "' (expected ISO-8601 with explicit UTC offset)");
    };
    int y, mo, d, h, mi, sec;
    if (s.size() < 20 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't') ||
        s[13] != ':' || s[16] != ':')
        return bad();
    if (!parse_uint(s, 0, 4, y) || !parse_uint(s, 5, 2, mo) || !parse_uint(s, 8, 2, d) ||
        !parse_uint(s, 11, 2, h) || !parse_uint(s, 14, 2, mi) || !parse_uint(s, 17, 2, sec))
        return bad();
    if (mo < 1 || mo > 12 || d < 1 || d > days_in_month(y, mo) || h > 23 || mi > 59 || sec > 59)
        return bad();
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) return bad();
    }
    if (pos >= s.size()) return bad(); // offset is mandatory
    std::int64_t offset = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        int oh = 0, om = 0;
        if (pos + 6 > s.size() || s[pos + 3] != ':' || !parse_uint(s, pos + 1, 2, oh) ||
            !parse_uint(s, pos + 4, 2, om) || oh > 23 || om > 59)
            return bad();
        offset = static_cast<std::int64_t>(oh) * 3600 + om * 60;
        if (s[pos] == '-') offset = -offset;
        pos += 6;
    } else {
        return bad();
    }
    if (pos != s.size()) return bad();
    std::int64_t epoch = days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + sec - offset;
    return UtcInstant{epoch};
}

std::string UtcInstant::str() const {
    std::int64_t days = floor_div(epoch_seconds, 86400);
    std::int64_t rem = epoch_seconds - days * 86400;
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

TradingDate UtcInstant::utc_date() const {
    return TradingDate::from_serial(floor_div(epoch_seconds, 86400));
}

int UtcInstant::utc_hour() const {
    std::int64_t days = floor_div(epoch_seconds, 86400);
    return static_cast<int>((epoch_seconds - days * 86400) / 3600);
}

Taxonomy Taxonomy::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_io("IoError", "cannot open taxonomy file: " + path);
    std::vector<EventLabel> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        labels.push_back(EventLabel{std::string(t)});
    }
    if (labels.empty()) fail_validation("EmptyTaxonomy", "taxonomy file has no labels: " + path);
    return from_labels(std::move(labels));
}

Taxonomy Taxonomy::from_labels(std::vector<EventLabel> labels) {
    Taxonomy tax;
    for (auto& l : labels) {
        if (!tax.index_.insert(l).second)
            fail_validation("DuplicateLabel", "duplicate taxonomy label: " + l.name);
        tax.ordered_.push_back(std::move(l));
    }
    return tax;
}

bool Taxonomy::contains(const EventLabel& label) const { return index_.count(label) > 0; }

void Taxonomy::require(const EventLabel& label, const std::string& context) const {
    if (!contains(label))
        fail_validation("UnknownLabel", context + ": label not in taxonomy: " + label.name);
}

Annotation Annotation::make(std::string tweet_id, double tone, std::set<EventLabel> labels) {
    if (!std::isfinite(tone))
        fail_validation("BadTone", "tone must be finite for tweet " + tweet_id);
    return Annotation{std::move(tweet_id), std::clamp(tone, -1.0, 1.0), std::move(labels)};
}

Horizon Horizon::of(int days) {
    if (days < 1) fail_validation("BadHorizon", "horizon must be >= 1 day, got " + std::to_string(days));
    return Horizon{days};
}

Tweet validate_tweet(const RawTweetRecord& raw) {
    auto where = " at line " + std::to_string(raw.line);
    auto need = [&](const std::optional<std::string>& f, const char* name) -> const std::string& {
        if (!f || trim(*f).empty())
            fail_validation("MissingField", std::string("missing field '") + name + "'" + where);
        return *f;
    };
    const std::string& id = need(raw.id, "id");
    const std::string& ts = need(raw.timestamp, "timestamp");
    const std::string& tk = need(raw.ticker, "ticker");
    if (!raw.text)
        fail_validation("MissingField", std::string("missing field 'text'") + where);
    if (trim(*raw.text).empty())
        fail_validation("EmptyText", "text is empty after trimming" + where);

    UtcInstant instant;
    try {
        instant = UtcInstant::parse(trim(ts));
    } catch (const Error& e) {
        fail_validation("BadTimestamp", std::string(e.what()) + where);
    }
    Ticker ticker = [&] {
        try {
            return Ticker::parse(trim(tk));
        } catch (const Error& e) {
            fail_validation("BadTicker", std::string(e.what()) + where);
        }
    }();
    return Tweet{std::string(trim(id)), instant, std::move(ticker), *raw.text};
}

std::vector<PriceBar> validate_price_series(std::vector<PriceBar> bars) {
    if (bars.empty()) return bars;
    const Ticker& t = bars.front().ticker;
    for (const auto& b : bars) {
        if (!(b.ticker == t))
            fail_validation("MixedTickers", "price series mixes " + t.str() + " and " +
                                                b.ticker.str());
        if (!(b.close > 0) || !std::isfinite(b.close))
            fail_validation("NonPositivePrice", "close must be > 0 for " + b.ticker.str() +
                                                    " on " + b.date.str());
    }
    std::stable_sort(bars.begin(), bars.end(),
                     [](const PriceBar& a, const PriceBar& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < bars.size(); ++i)
        if (bars[i].date == bars[i - 1].date)
            fail_validation("DuplicateDate", "duplicate price date " + bars[i].date.str() +
                                                 " for " + t.str());
    return bars;
}

} // namespace eventalpha
