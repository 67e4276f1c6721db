#pragma once

#include "core/domain.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace eventalpha {

struct PlantedEffect {
    EventLabel label;
    double drift_per_day = 0; // added to each daily log return in the post-event window
    std::size_t occurrences = 0;
};

struct SynthConfig {
    std::size_t n_tickers = 50;
    std::size_t n_days = 250;
    std::size_t n_tweets = 5000;
    std::uint64_t seed = 42;
    double daily_vol = 0.01;      // log-return standard deviation
    double tone_noise_std = 0.1;
    int max_horizon = 7;          // drift injection window, in trading rows
    std::vector<PlantedEffect> planted_effects;
    std::map<EventLabel, std::vector<std::string>> label_keyword_map;
    double base_price = 50.0;
    TradingDate start_date{2017, 1, 2};
};

struct SynthOutputs {
    std::string tweets_path;
    std::string prices_path;
    std::string manifest_path; // ground truth: ticker,date,label,drift
    std::string taxonomy_path;
    std::string lexicon_path;  // tone tokens -> planted tone values
    std::string keywords_path; // label,keyword rows for the mock tagger
    std::size_t occurrence_rows = 0;
    std::size_t noise_tweets = 0;
};

// Writes a self-contained synthetic dataset: random-walk prices with
// planted post-event drifts, a tweet corpus whose texts encode label
// keywords and quantized tones, the ground-truth manifest, and the
// taxonomy/lexicon/keyword files the mock annotation backend needs to
// recover the planted signal. Identical config => byte-identical files.
//
// Occurrences are sampled without replacement and stratified by ticker
// across labels, so one label's drift never contaminates another label's
// samples.
SynthOutputs generate(const SynthConfig& config, const std::string& out_dir);

// A ready-to-run demo setup: one contrarian label with negative drift
// plus null labels.
SynthConfig default_synth_config();

} // namespace eventalpha
