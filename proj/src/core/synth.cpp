#include "core/synth.hpp"

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>

namespace eventalpha {

namespace {

constexpr int kMaxQuantiles = 10; // largest sort the backtester runs by default

std::string ticker_name(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "SYN%03zu", i);
    return buf;
}

// Quantized tone token, e.g. +0.500 -> "tqp500", -0.046 -> "tqm046".
std::string tone_token(double tone, double& quantized) {
    double clamped = std::clamp(tone, -1.0, 1.0);
    long long millis = std::llround(clamped * 1000.0);
    quantized = static_cast<double>(millis) / 1000.0;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "tq%c%03lld", millis < 0 ? 'm' : 'p', std::llabs(millis));
    return buf;
}

void validate(const SynthConfig& c) {
    auto bad = [](const std::string& msg) { fail_validation("ConfigInvalid", msg); };
    if (c.n_tickers < kMaxQuantiles)
        bad("n_tickers must be >= " + std::to_string(kMaxQuantiles));
    if (c.max_horizon < 1) bad("max_horizon must be >= 1");
    if (c.n_days <= static_cast<std::size_t>(c.max_horizon) + 5)
        bad("n_days must exceed max_horizon + 5");
    if (!(c.daily_vol > 0)) bad("daily_vol must be > 0");
    if (c.tone_noise_std < 0) bad("tone_noise_std must be >= 0");
    if (!(c.base_price > 0)) bad("base_price must be > 0");
    std::set<EventLabel> seen;
    std::size_t total_occ = 0;
    for (const auto& e : c.planted_effects) {
        if (e.label.name.empty()) bad("planted effect with empty label");
        if (!seen.insert(e.label).second) bad("duplicate planted label: " + e.label.name);
        if (e.occurrences == 0) bad("planted label with zero occurrences: " + e.label.name);
        auto kw = c.label_keyword_map.find(e.label);
        if (kw == c.label_keyword_map.end() || kw->second.empty())
            bad("planted label has no keywords: " + e.label.name);
        total_occ += e.occurrences;
    }
    if (total_occ > c.n_tweets)
        bad("planted occurrences (" + std::to_string(total_occ) + ") exceed n_tweets");
}

} // namespace

SynthOutputs generate(const SynthConfig& config, const std::string& out_dir) {
    validate(config);
    std::filesystem::create_directories(out_dir);
    SplitMix64 rng(config.seed);

    const std::size_t n_labels = config.planted_effects.size();
    const std::size_t n_days = config.n_days;
    const int h_max = config.max_horizon;

    // --- occurrences: stratified by ticker, sampled without replacement ---
    // Label l may only use tickers with index % n_labels == l; planted
    // drifts therefore never leak into another label's forward windows.
    struct Occurrence {
        std::size_t ticker;
        std::size_t day;
        std::size_t effect;
    };
    std::vector<Occurrence> occurrences;
    const std::size_t day_lo = 1;
    const std::size_t day_hi = n_days - 1 - static_cast<std::size_t>(h_max); // inclusive
    for (std::size_t e = 0; e < n_labels; ++e) {
        const auto& effect = config.planted_effects[e];
        std::vector<std::pair<std::size_t, std::size_t>> cells;
        for (std::size_t i = e; i < config.n_tickers; i += n_labels)
            for (std::size_t d = day_lo; d <= day_hi; ++d) cells.emplace_back(i, d);
        if (effect.occurrences > cells.size())
            fail_validation("ConfigInvalid",
                            "label '" + effect.label.name + "' wants " +
                                std::to_string(effect.occurrences) + " occurrences but only " +
                                std::to_string(cells.size()) + " ticker-day cells exist");
        // partial Fisher-Yates: the first `occurrences` slots are the draw
        for (std::size_t k = 0; k < effect.occurrences; ++k) {
            std::size_t j = k + rng.below(cells.size() - k);
            std::swap(cells[k], cells[j]);
            occurrences.push_back({cells[k].first, cells[k].second, e});
        }
    }

    // --- prices: per-ticker random walk in log space, plus drifts ---
    std::vector<std::vector<double>> daily(config.n_tickers, std::vector<double>(n_days, 0.0));
    for (std::size_t i = 0; i < config.n_tickers; ++i)
        for (std::size_t d = 1; d < n_days; ++d) daily[i][d] = rng.normal(0.0, config.daily_vol);
    for (const Occurrence& occ : occurrences) {
        double drift = config.planted_effects[occ.effect].drift_per_day;
        if (drift == 0.0) continue;
        for (std::size_t d = occ.day + 1; d <= occ.day + static_cast<std::size_t>(h_max); ++d)
            daily[occ.ticker][d] += drift;
    }

    std::vector<TradingDate> dates(n_days);
    for (std::size_t d = 0; d < n_days; ++d)
        dates[d] = config.start_date.plus_days(static_cast<int>(d));

    std::ostringstream prices;
    prices << "date,ticker,close\n";
    char close_buf[32];
    for (std::size_t i = 0; i < config.n_tickers; ++i) {
        double log_price = std::log(config.base_price);
        for (std::size_t d = 0; d < n_days; ++d) {
            log_price += daily[i][d];
            // fixed 6-decimal prices keep the files stable across libm builds
            std::snprintf(close_buf, sizeof(close_buf), "%.6f", std::exp(log_price));
            prices << dates[d].str() << ',' << ticker_name(i) << ',' << close_buf << '\n';
        }
    }

    // --- tweets: one per occurrence, then unlabeled noise ---
    std::ostringstream tweets;
    tweets << "id,timestamp,ticker,text\n";
    std::map<std::string, double> lexicon; // tone token -> value
    std::size_t tweet_counter = 0;
    auto emit_tweet = [&](std::size_t ticker, std::size_t day, const std::string& keyword,
                          double tone) {
        double quantized = 0;
        std::string token = tone_token(tone, quantized);
        lexicon.emplace(token, quantized);
        std::string text = keyword.empty() ? token + " general market chatter"
                                           : keyword + " " + token + " event chatter";
        std::int64_t secs = dates[day].serial() * 86400 + 13 * 3600 +
                            static_cast<std::int64_t>(rng.below(4 * 3600));
        char id[16];
        std::snprintf(id, sizeof(id), "tw%06zu", tweet_counter++);
        std::vector<std::string> row = {id, UtcInstant{secs}.str(), ticker_name(ticker), text};
        write_csv_row(tweets, row);
    };

    std::ostringstream manifest;
    manifest << "ticker,date,label,drift\n";
    for (const Occurrence& occ : occurrences) {
        const auto& effect = config.planted_effects[occ.effect];
        const auto& keywords = config.label_keyword_map.at(effect.label);
        const std::string& kw = keywords[rng.below(keywords.size())];
        double sign = effect.drift_per_day > 0 ? 1.0 : (effect.drift_per_day < 0 ? -1.0 : 0.0);
        emit_tweet(occ.ticker, occ.day, kw, sign + rng.normal(0.0, config.tone_noise_std));
        std::vector<std::string> row = {ticker_name(occ.ticker), dates[occ.day].str(),
                                        effect.label.name, fmt_double(effect.drift_per_day)};
        write_csv_row(manifest, row);
    }
    std::size_t noise = config.n_tweets - occurrences.size();
    for (std::size_t k = 0; k < noise; ++k)
        emit_tweet(rng.below(config.n_tickers), rng.below(n_days), "",
                   rng.normal(0.0, config.tone_noise_std));

    // --- support files for the mock annotation backend ---
    std::set<EventLabel> labels;
    for (const auto& e : config.planted_effects) labels.insert(e.label);
    for (const auto& [label, kws] : config.label_keyword_map) labels.insert(label);
    std::ostringstream taxonomy;
    taxonomy << "# synthetic event taxonomy\n";
    for (const auto& l : labels) taxonomy << l.name << '\n';

    std::ostringstream lex;
    lex << "term,weight\n";
    for (const auto& [term, weight] : lexicon) {
        std::vector<std::string> row = {term, fmt_double(weight)};
        write_csv_row(lex, row);
    }

    std::ostringstream keywords;
    keywords << "label,keyword\n";
    for (const auto& [label, kws] : config.label_keyword_map)
        for (const auto& kw : kws) {
            std::vector<std::string> row = {label.name, kw};
            write_csv_row(keywords, row);
        }

    auto path_of = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    SynthOutputs out;
    out.tweets_path = path_of("tweets.csv");
    out.prices_path = path_of("prices.csv");
    out.manifest_path = path_of("manifest.csv");
    out.taxonomy_path = path_of("taxonomy.txt");
    out.lexicon_path = path_of("lexicon.csv");
    out.keywords_path = path_of("keywords.csv");
    out.occurrence_rows = occurrences.size();
    out.noise_tweets = noise;
    write_file(out.tweets_path, tweets.str());
    write_file(out.prices_path, prices.str());
    write_file(out.manifest_path, manifest.str());
    write_file(out.taxonomy_path, taxonomy.str());
    write_file(out.lexicon_path, lex.str());
    write_file(out.keywords_path, keywords.str());
    return out;
}

SynthConfig default_synth_config() {
    SynthConfig c;
    c.planted_effects = {
        {EventLabel{"Speculation/Rumor"}, -0.005, 200},
        {EventLabel{"Retail Investor Buzz"}, 0.0, 150},
        {EventLabel{"Social Media Backlash"}, 0.0, 150},
        {EventLabel{"Brand Boycott"}, 0.0, 150},
    };
    c.label_keyword_map = {
        {EventLabel{"Speculation/Rumor"}, {"rumorwave", "mergerwhisper"}},
        {EventLabel{"Retail Investor Buzz"}, {"buzzstorm", "yoloflow"}},
        {EventLabel{"Social Media Backlash"}, {"backlashtide"}},
        {EventLabel{"Brand Boycott"}, {"boycottcall"}},
    };
    return c;
}

} // namespace eventalpha
