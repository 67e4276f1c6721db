#include "core/config.hpp"

#include "core/csv.hpp"
#include "core/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <set>

namespace eventalpha {

using nlohmann::json;

namespace {

const json* child(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

template <class T>
void read_into(const json& obj, const char* key, T& target) {
    if (const json* v = child(obj, key)) {
        try {
            target = v->get<T>();
        } catch (const json::exception&) {
            fail_validation("BadConfig", std::string("config field '") + key + "' has wrong type");
        }
    }
}

void read_paths(const json& obj, RunConfig::Paths& paths) {
    read_into(obj, "tweets", paths.tweets);
    read_into(obj, "prices", paths.prices);
    read_into(obj, "taxonomy", paths.taxonomy);
    read_into(obj, "lexicon", paths.lexicon);
    read_into(obj, "keywords", paths.keywords);
    read_into(obj, "cache", paths.cache);
    read_into(obj, "prompt_template", paths.prompt_template);
}

void read_synth(const json& obj, SynthConfig& synth) {
    read_into(obj, "n_tickers", synth.n_tickers);
    read_into(obj, "n_days", synth.n_days);
    read_into(obj, "n_tweets", synth.n_tweets);
    read_into(obj, "seed", synth.seed);
    read_into(obj, "daily_vol", synth.daily_vol);
    read_into(obj, "tone_noise_std", synth.tone_noise_std);
    read_into(obj, "max_horizon", synth.max_horizon);
    read_into(obj, "base_price", synth.base_price);
    if (const json* sd = child(obj, "start_date"))
        synth.start_date = TradingDate::parse(sd->get<std::string>());
    if (const json* effects = child(obj, "planted_effects")) {
        synth.planted_effects.clear();
        for (const auto& e : *effects) {
            PlantedEffect effect;
            effect.label = EventLabel{e.at("label").get<std::string>()};
            read_into(e, "drift", effect.drift_per_day);
            read_into(e, "occurrences", effect.occurrences);
            synth.planted_effects.push_back(std::move(effect));
        }
    }
    if (const json* kws = child(obj, "keywords")) {
        synth.label_keyword_map.clear();
        for (auto it = kws->begin(); it != kws->end(); ++it)
            synth.label_keyword_map[EventLabel{it.key()}] =
                it.value().get<std::vector<std::string>>();
    }
}

} // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    json root = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (root.is_discarded() || !root.is_object())
        fail_validation("BadConfig", "config is not a JSON object");

    RunConfig cfg;
    read_into(root, "out", cfg.out_dir);
    read_into(root, "workers", cfg.workers);
    if (const json* paths = child(root, "paths")) read_paths(*paths, cfg.paths);

    if (const json* ing = child(root, "ingestion")) {
        std::string mode = "strict";
        read_into(*ing, "mode", mode);
        if (mode == "strict") cfg.ingestion.mode = IngestMode::strict;
        else if (mode == "lenient") cfg.ingestion.mode = IngestMode::lenient;
        else fail_validation("BadConfig", "ingestion.mode must be 'strict' or 'lenient'");
        read_into(*ing, "cutoff_hour", cfg.ingestion.cutoff_hour);
        if (cfg.ingestion.cutoff_hour < 0 || cfg.ingestion.cutoff_hour > 24)
            fail_validation("BadConfig", "ingestion.cutoff_hour must be in [0, 24]");
    }

    if (const json* ann = child(root, "annotation")) {
        read_into(*ann, "backend", cfg.annotation.backend);
        read_into(*ann, "model_id", cfg.annotation.model_id);
        read_into(*ann, "template_version", cfg.annotation.template_version);
        std::string policy = "drop";
        read_into(*ann, "policy", policy);
        if (policy == "drop") cfg.annotation.policy = UnknownLabelPolicy::drop;
        else if (policy == "error") cfg.annotation.policy = UnknownLabelPolicy::error;
        else fail_validation("BadConfig", "annotation.policy must be 'drop' or 'error'");
        read_into(*ann, "fail_soft", cfg.annotation.fail_soft);
        read_into(*ann, "max_in_flight", cfg.annotation.max_in_flight);
        read_into(*ann, "retry_attempts", cfg.annotation.retry_attempts);
        read_into(*ann, "retry_base_ms", cfg.annotation.retry_base_ms);
        read_into(*ann, "timeout_seconds", cfg.annotation.timeout_seconds);
        read_into(*ann, "intensity_threshold", cfg.annotation.intensity_threshold);
        read_into(*ann, "url", cfg.annotation.url);
        read_into(*ann, "auth_token", cfg.annotation.auth_token);
        static const std::set<std::string> backends = {"mock", "llm", "replay"};
        if (!backends.count(cfg.annotation.backend))
            fail_validation("BadConfig", "annotation.backend must be mock, llm, or replay");
    }

    if (const json* fac = child(root, "factor")) {
        std::string mode = attribution_mode_name(cfg.factor.attribution);
        read_into(*fac, "attribution", mode);
        cfg.factor.attribution = attribution_mode_from(mode);
    }

    if (const json* bt = child(root, "backtest")) {
        read_into(*bt, "horizons", cfg.backtest.horizons);
        read_into(*bt, "long_short_quantiles", cfg.backtest.long_short_quantiles);
        read_into(*bt, "long_only_quantiles", cfg.backtest.long_only_quantiles);
        std::string pos = position_mode_name(cfg.backtest.position_mode);
        read_into(*bt, "position_mode", pos);
        cfg.backtest.position_mode = position_mode_from(pos);
        read_into(*bt, "label_filter", cfg.backtest.label_filter);
    }
    if (cfg.backtest.horizons.empty())
        fail_validation("BadConfig", "backtest.horizons must be non-empty");

    if (const json* st = child(root, "stats")) {
        std::string mode = cfg.stats.ic_mode == IcMode::pooled ? "pooled" : "daily";
        read_into(*st, "ic_mode", mode);
        if (mode == "pooled") cfg.stats.ic_mode = IcMode::pooled;
        else if (mode == "daily") cfg.stats.ic_mode = IcMode::daily_mean;
        else fail_validation("BadConfig", "stats.ic_mode must be 'pooled' or 'daily'");
    }

    if (const json* synth = child(root, "synth")) read_synth(*synth, cfg.synth);

    // Environment overrides secrets only.
    if (const char* url = std::getenv("EVENTALPHA_LLM_URL"); url && *url)
        cfg.annotation.url = url;
    if (const char* token = std::getenv("EVENTALPHA_LLM_TOKEN"); token && *token)
        cfg.annotation.auth_token = token;

    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    return from_json_text(read_file(path));
}

json RunConfig::to_json() const {
    json root;
    root["out"] = out_dir;
    root["workers"] = workers;
    root["paths"] = {{"tweets", paths.tweets},   {"prices", paths.prices},
                     {"taxonomy", paths.taxonomy}, {"lexicon", paths.lexicon},
                     {"keywords", paths.keywords}, {"cache", paths.cache},
                     {"prompt_template", paths.prompt_template}};
    root["ingestion"] = {{"mode", ingestion.mode == IngestMode::strict ? "strict" : "lenient"},
                         {"cutoff_hour", ingestion.cutoff_hour}};
    root["annotation"] = {
        {"backend", annotation.backend},
        {"model_id", annotation.model_id},
        {"template_version", annotation.template_version},
        {"policy", annotation.policy == UnknownLabelPolicy::drop ? "drop" : "error"},
        {"fail_soft", annotation.fail_soft},
        {"max_in_flight", annotation.max_in_flight},
        {"retry_attempts", annotation.retry_attempts},
        {"retry_base_ms", annotation.retry_base_ms},
        {"timeout_seconds", annotation.timeout_seconds},
        {"intensity_threshold", annotation.intensity_threshold},
        {"url", annotation.url}}; // the auth token is never echoed
    root["factor"] = {{"attribution", attribution_mode_name(factor.attribution)}};
    root["backtest"] = {{"horizons", backtest.horizons},
                        {"long_short_quantiles", backtest.long_short_quantiles},
                        {"long_only_quantiles", backtest.long_only_quantiles},
                        {"position_mode", position_mode_name(backtest.position_mode)},
                        {"label_filter", backtest.label_filter}};
    root["stats"] = {{"ic_mode", stats.ic_mode == IcMode::pooled ? "pooled" : "daily"}};

    json effects = json::array();
    for (const auto& e : synth.planted_effects)
        effects.push_back({{"label", e.label.name},
                           {"drift", e.drift_per_day},
                           {"occurrences", e.occurrences}});
    json keywords = json::object();
    for (const auto& [label, kws] : synth.label_keyword_map) keywords[label.name] = kws;
    root["synth"] = {{"n_tickers", synth.n_tickers},
                     {"n_days", synth.n_days},
                     {"n_tweets", synth.n_tweets},
                     {"seed", synth.seed},
                     {"daily_vol", synth.daily_vol},
                     {"tone_noise_std", synth.tone_noise_std},
                     {"max_horizon", synth.max_horizon},
                     {"base_price", synth.base_price},
                     {"start_date", synth.start_date.str()},
                     {"planted_effects", effects},
                     {"keywords", keywords}};
    return root;
}

std::vector<Horizon> RunConfig::horizons() const {
    std::vector<int> days = backtest.horizons;
    std::sort(days.begin(), days.end());
    days.erase(std::unique(days.begin(), days.end()), days.end());
    std::vector<Horizon> out;
    out.reserve(days.size());
    for (int d : days) out.push_back(Horizon::of(d));
    return out;
}

} // namespace eventalpha
