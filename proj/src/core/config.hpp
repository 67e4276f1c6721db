#pragma once

#include "core/annotate.hpp"
#include "core/backtest.hpp"
#include "core/factor.hpp"
#include "core/ingest.hpp"
#include "core/stats.hpp"
#include "core/synth.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace eventalpha {

// One pipeline run: every knob the stages consume, JSON-backed. Secrets
// (LLM URL and token) may come from EVENTALPHA_LLM_URL /
// EVENTALPHA_LLM_TOKEN, which override the file.
struct RunConfig {
    std::string out_dir = "out";
    int workers = 0; // 0 = auto

    struct Paths {
        std::string tweets;
        std::string prices;
        std::string taxonomy;
        std::string lexicon;
        std::string keywords;
        std::string cache;          // default: <out>/annotate/cache.jsonl
        std::string prompt_template; // optional file override
    } paths;

    struct Ingestion {
        IngestMode mode = IngestMode::strict;
        int cutoff_hour = 24; // 24 disables the cutoff
    } ingestion;

    struct AnnotationCfg {
        std::string backend = "mock"; // mock | llm | replay
        std::string model_id = "default-model";
        std::string template_version = "v1";
        UnknownLabelPolicy policy = UnknownLabelPolicy::drop;
        bool fail_soft = true;
        int max_in_flight = 8;
        int retry_attempts = 4;
        int retry_base_ms = 1000;
        int timeout_seconds = 30;
        double intensity_threshold = 0.0; // |tone| floor applied at factor build
        std::string url;        // EVENTALPHA_LLM_URL overrides
        std::string auth_token; // EVENTALPHA_LLM_TOKEN overrides
    } annotation;

    struct FactorCfg {
        AttributionMode attribution = AttributionMode::proportional;
    } factor;

    struct BacktestCfg {
        std::vector<int> horizons = {1, 2, 3, 7};
        int long_short_quantiles = 10;
        int long_only_quantiles = 5;
        PositionMode position_mode = PositionMode::raw;
        std::string label_filter; // empty = all labels
    } backtest;

    struct StatsCfg {
        IcMode ic_mode = IcMode::pooled;
    } stats;

    SynthConfig synth = default_synth_config();

    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_file(const std::string& path);

    nlohmann::json to_json() const; // effective values, echoed into manifests

    std::vector<Horizon> horizons() const;
};

} // namespace eventalpha
