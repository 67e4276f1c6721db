#include "core/pipeline.hpp"

#include "core/csv.hpp"
#include "core/digest.hpp"
#include "core/errors.hpp"
#include "core/log.hpp"
#include "core/parallel.hpp"
#include "core/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace eventalpha {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class StageTimer {
public:
    StageTimer() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const {
        auto d = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration<double, std::milli>(d).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

json digest_of(const std::string& path) { return fnv1a64_hex(read_file(path)); }

// --- intermediate file formats ---

struct AlignedRow {
    std::string tweet_id;
    Ticker ticker;
    TradingDate date;
};

std::string aligned_to_csv(std::span<const AlignedTweet> aligned) {
    std::ostringstream out;
    out << "tweet_id,ticker,trading_date\n";
    for (const auto& a : aligned) {
        std::vector<std::string> row = {a.tweet.id, a.tweet.ticker.str(), a.trading_date.str()};
        write_csv_row(out, row);
    }
    return out.str();
}

std::vector<AlignedRow> load_aligned(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("IoError", "cannot open aligned file: " + path);
    CsvReader reader(in);
    auto header = reader.next();
    if (!header || header->fields.size() != 3)
        fail_validation("BadHeader", path + ": expected tweet_id,ticker,trading_date");
    std::vector<AlignedRow> rows;
    while (auto rec = reader.next()) {
        if (rec->fields.size() == 1 && trim(rec->fields[0]).empty()) continue;
        if (rec->fields.size() != 3)
            fail_validation("BadRow", path + ": wrong field count at line " + std::to_string(rec->line));
        rows.push_back(AlignedRow{rec->fields[0], Ticker::parse(trim(rec->fields[1])),
                                  TradingDate::parse(trim(rec->fields[2]))});
    }
    return rows;
}

std::string annotations_to_csv(std::span<const Annotation> annotations) {
    std::ostringstream out;
    out << "tweet_id,tone,labels\n";
    for (const auto& a : annotations) {
        std::string joined;
        for (const auto& l : a.labels) {
            if (!joined.empty()) joined.push_back('|');
            joined += l.name;
        }
        std::vector<std::string> row = {a.tweet_id, fmt_double(a.tone), joined};
        write_csv_row(out, row);
    }
    return out.str();
}

std::vector<Annotation> load_annotations(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("IoError", "cannot open annotations file: " + path);
    CsvReader reader(in);
    auto header = reader.next();
    if (!header || header->fields.size() != 3)
        fail_validation("BadHeader", path + ": expected tweet_id,tone,labels");
    std::vector<Annotation> rows;
    while (auto rec = reader.next()) {
        if (rec->fields.size() == 1 && trim(rec->fields[0]).empty()) continue;
        if (rec->fields.size() != 3)
            fail_validation("BadRow", path + ": wrong field count at line " + std::to_string(rec->line));
        std::set<EventLabel> labels;
        const std::string& joined = rec->fields[2];
        std::size_t pos = 0;
        while (pos <= joined.size() && !joined.empty()) {
            std::size_t bar = joined.find('|', pos);
            std::string piece = joined.substr(pos, bar == std::string::npos ? bar : bar - pos);
            if (!piece.empty()) labels.insert(EventLabel{piece});
            if (bar == std::string::npos) break;
            pos = bar + 1;
        }
        rows.push_back(Annotation::make(rec->fields[0],
                                        parse_double_strict(rec->fields[1], path, rec->line),
                                        std::move(labels)));
    }
    return rows;
}

std::string returns_to_csv(std::span<const ReturnSeries> series) {
    std::ostringstream out;
    out << "ticker,date,log_return\n";
    for (const auto& s : series)
        for (const auto& e : s.entries) {
            std::vector<std::string> row = {s.ticker.str(), e.date.str(), fmt_double(e.log_return)};
            write_csv_row(out, row);
        }
    return out.str();
}

std::string samples_to_csv(std::span<const EventSample> samples, std::span<const Horizon> horizons) {
    std::ostringstream out;
    out << "ticker,date,label,exposure,tweet_count";
    for (Horizon h : horizons) out << ",fwd_" << h.days;
    out << '\n';
    for (const auto& s : samples) {
        std::vector<std::string> row = {s.ticker.str(), s.date.str(), s.label.name,
                                        fmt_double(s.exposure), std::to_string(s.tweet_count)};
        for (Horizon h : horizons) {
            auto it = s.fwd.find(h.days);
            row.push_back(it == s.fwd.end() ? std::string() : fmt_double(it->second));
        }
        write_csv_row(out, row, "/");
    }
    return out.str();
}

std::vector<EventSample> load_samples(const std::string& path, std::vector<Horizon>& horizons_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("IoError", "cannot open samples file: " + path);
    CsvReader reader(in);
    auto header = reader.next();
    if (!header || header->fields.size() < 6)
        fail_validation("BadHeader", path + ": expected sample columns plus fwd_<h>");
    horizons_out.clear();
    for (std::size_t i = 5; i < header->fields.size(); ++i) {
        std::string_view name = header->fields[i];
        if (name.rfind("fwd_", 0) != 0)
            fail_validation("BadHeader", path + ": unexpected column '" + std::string(name) + "'");
        horizons_out.push_back(
            Horizon::of(static_cast<int>(parse_int_strict(name.substr(4), path, header->line))));
    }
    std::vector<EventSample> samples;
    while (auto rec = reader.next()) {
        if (rec->fields.size() == 1 && trim(rec->fields[0]).empty()) continue;
        if (rec->fields.size() != header->fields.size())
            fail_validation("BadRow", path + ": wrong field count at line " + std::to_string(rec->line));
        EventSample s{Ticker::parse(trim(rec->fields[0])), TradingDate::parse(trim(rec->fields[1])),
                      EventLabel{rec->fields[2]},
                      parse_double_strict(rec->fields[3], path, rec->line),
                      static_cast<std::uint32_t>(parse_int_strict(rec->fields[4], path, rec->line)),
                      {}};
        for (std::size_t i = 0; i < horizons_out.size(); ++i) {
            const std::string& cell = rec->fields[5 + i];
            if (!trim(cell).empty())
                s.fwd[horizons_out[i].days] = parse_double_strict(cell, path, rec->line);
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

} // namespace

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) {
    if (config_.out_dir.empty())
        fail_validation("BadConfig", "output directory must not be empty");
}

std::string Pipeline::stage_dir(const std::string& stage) const {
    return (fs::path(config_.out_dir) / stage).string();
}

std::string Pipeline::stage_file(const std::string& stage, const std::string& name) const {
    return (fs::path(config_.out_dir) / stage / name).string();
}

std::string Pipeline::resolve_input(const std::string& configured, const std::string& synth_name,
                                    const std::string& what) const {
    if (!configured.empty()) {
        if (!fs::exists(configured))
            fail_io("IoError", what + " not found: " + configured);
        return configured;
    }
    std::string fallback = stage_file("synth", synth_name);
    if (fs::exists(fallback)) return fallback;
    fail_validation("MissingInput", "no " + what + " configured and no synthetic " + synth_name +
                                        " under " + stage_dir("synth") +
                                        " (set paths." + what + " or run `synth` first)");
}

std::string Pipeline::require_stage_file(const std::string& stage, const std::string& name) const {
    std::string path = stage_file(stage, name);
    if (!fs::exists(path))
        fail_validation("MissingStageOutput",
                        "missing stage output " + path + "; run `" + stage + "` first");
    return path;
}

json Pipeline::finish_stage(const std::string& stage, json counts, json inputs,
                            double wall_ms) const {
    json manifest;
    manifest["stage"] = stage;
    manifest["counts"] = std::move(counts);
    manifest["inputs"] = std::move(inputs);
    manifest["config"] = config_.to_json();
    // Wall time is logged, not persisted: manifests must be byte-stable
    // across identical runs.
    write_file(stage_file(stage, "manifest.json"), manifest.dump(2) + "\n");
    log_line(LogLevel::info,
             stage + " done in " + fmt_fixed(wall_ms, 1) + " ms");
    return manifest;
}

json Pipeline::run_stage(const std::string& stage) {
    if (stage == "synth") return run_synth();
    if (stage == "ingest") return run_ingest();
    if (stage == "annotate") return run_annotate();
    if (stage == "factors") return run_factors();
    if (stage == "backtest") return run_backtest();
    if (stage == "report") return run_report();
    fail_validation("BadStage", "unknown stage '" + stage + "'");
}

json Pipeline::run_synth() {
    StageTimer timer;
    SynthOutputs out = generate(config_.synth, stage_dir("synth"));
    json counts{{"occurrences", out.occurrence_rows},
                {"noise_tweets", out.noise_tweets},
                {"tickers", config_.synth.n_tickers},
                {"days", config_.synth.n_days}};
    json inputs = json::object();
    for (const auto& p : {out.tweets_path, out.prices_path, out.manifest_path})
        inputs[fs::path(p).filename().string()] = digest_of(p);
    return finish_stage("synth", std::move(counts), std::move(inputs), timer.elapsed_ms());
}

json Pipeline::run_ingest() {
    StageTimer timer;
    std::string tweets_path = resolve_input(config_.paths.tweets, "tweets.csv", "tweets");
    std::string prices_path = resolve_input(config_.paths.prices, "prices.csv", "prices");

    TweetLoadResult tweets = load_tweets(tweets_path, config_.ingestion.mode);
    PriceMap prices = load_prices(prices_path);
    std::vector<AlignedTweet> aligned = align_tweets(tweets.tweets, config_.ingestion.cutoff_hour);

    // Per-ticker returns in parallel, merged in map (ticker) order.
    std::vector<const std::vector<PriceBar>*> series_ptrs;
    series_ptrs.reserve(prices.size());
    for (const auto& [ticker, bars] : prices) series_ptrs.push_back(&bars);
    std::vector<std::optional<ReturnSeries>> slots(series_ptrs.size());
    std::size_t short_series = 0;
    parallel_for(series_ptrs.size(), effective_workers(config_.workers), [&](std::size_t i) {
        if (series_ptrs[i]->size() >= 2) slots[i] = compute_log_returns(*series_ptrs[i]);
    });
    std::vector<ReturnSeries> returns;
    for (auto& s : slots) {
        if (s) returns.push_back(std::move(*s));
        else ++short_series;
    }

    std::size_t orphan_tweets = 0;
    for (const auto& a : aligned)
        if (!prices.count(a.tweet.ticker)) ++orphan_tweets;

    write_file(stage_file("ingest", "tweets_clean.csv"), tweets_to_csv(tweets.tweets));
    write_file(stage_file("ingest", "prices_clean.csv"), prices_to_csv(prices));
    write_file(stage_file("ingest", "aligned.csv"), aligned_to_csv(aligned));
    write_file(stage_file("ingest", "returns.csv"), returns_to_csv(returns));

    json counts{{"rows_read", tweets.rows_read},
                {"tweets", tweets.tweets.size()},
                {"dropped_rows", tweets.dropped},
                {"tickers", prices.size()},
                {"short_price_series", short_series},
                {"orphan_tweets", orphan_tweets}};
    json inputs{{"tweets", digest_of(tweets_path)}, {"prices", digest_of(prices_path)}};
    return finish_stage("ingest", std::move(counts), std::move(inputs), timer.elapsed_ms());
}

json Pipeline::run_annotate() {
    StageTimer timer;
    std::string tweets_path = require_stage_file("ingest", "tweets_clean.csv");
    std::string taxonomy_path = resolve_input(config_.paths.taxonomy, "taxonomy.txt", "taxonomy");
    std::string lexicon_path = resolve_input(config_.paths.lexicon, "lexicon.csv", "lexicon");

    TweetLoadResult tweets = load_tweets(tweets_path, IngestMode::strict);
    Taxonomy taxonomy = Taxonomy::load(taxonomy_path);
    Lexicon lexicon = Lexicon::load(lexicon_path);

    std::string template_text = kDefaultPromptTemplate;
    if (!config_.paths.prompt_template.empty())
        template_text = read_file(config_.paths.prompt_template);

    LlmClientConfig client;
    client.url = config_.annotation.url;
    client.auth_token = config_.annotation.auth_token;
    client.model_id = config_.annotation.model_id;
    client.prompt_template =
        PromptTemplate::make(template_text, config_.annotation.template_version);
    client.policy = config_.annotation.policy;
    client.max_in_flight = config_.annotation.max_in_flight;
    client.retry_attempts = config_.annotation.retry_attempts;
    client.retry_base_ms = config_.annotation.retry_base_ms;
    client.fail_soft = config_.annotation.fail_soft;

    std::string cache_path = config_.paths.cache.empty() ? stage_file("annotate", "cache.jsonl")
                                                         : config_.paths.cache;

    std::vector<Annotation> annotations;
    AnnotateStats stats;
    json inputs{{"tweets_clean", digest_of(tweets_path)},
                {"taxonomy", digest_of(taxonomy_path)},
                {"lexicon", digest_of(lexicon_path)}};
    const std::string& backend = config_.annotation.backend;
    if (backend == "mock") {
        std::string keywords_path =
            resolve_input(config_.paths.keywords, "keywords.csv", "keywords");
        KeywordMap keyword_map = load_keyword_map(keywords_path);
        annotations = annotate_mock(tweets.tweets, keyword_map, taxonomy, lexicon);
        inputs["keywords"] = digest_of(keywords_path);
    } else if (backend == "llm") {
        AnnotationCache cache = AnnotationCache::open(cache_path);
        auto transport = make_http_transport(config_.annotation.timeout_seconds);
        annotations =
            annotate_llm(tweets.tweets, taxonomy, lexicon, client, cache, *transport, &stats);
    } else { // replay
        AnnotationCache cache = AnnotationCache::open(cache_path);
        annotations = annotate_replay(tweets.tweets, taxonomy, lexicon, client, cache, &stats);
    }

    write_file(stage_file("annotate", "annotations.csv"), annotations_to_csv(annotations));
    std::size_t labeled = 0;
    for (const auto& a : annotations)
        if (!a.labels.empty()) ++labeled;
    json counts{{"annotations", annotations.size()},
                {"labeled", labeled},
                {"requests_sent", stats.requests_sent},
                {"cache_hits", stats.cache_hits},
                {"failures", stats.failures}};
    return finish_stage("annotate", std::move(counts), std::move(inputs), timer.elapsed_ms());
}

json Pipeline::run_factors() {
    StageTimer timer;
    std::string aligned_path = require_stage_file("ingest", "aligned.csv");
    std::string annotations_path = require_stage_file("annotate", "annotations.csv");
    std::string taxonomy_path = resolve_input(config_.paths.taxonomy, "taxonomy.txt", "taxonomy");

    std::vector<AlignedRow> aligned = load_aligned(aligned_path);
    std::vector<Annotation> annotations = load_annotations(annotations_path);
    Taxonomy taxonomy = Taxonomy::load(taxonomy_path);

    std::map<std::string, const Annotation*> by_id;
    for (const auto& a : annotations) by_id.emplace(a.tweet_id, &a);

    std::vector<PanelInput> inputs_vec;
    inputs_vec.reserve(aligned.size());
    for (const auto& row : aligned) {
        auto it = by_id.find(row.tweet_id);
        if (it == by_id.end())
            fail_validation("MissingAnnotation",
                            "no annotation for tweet '" + row.tweet_id + "'");
        for (const auto& l : it->second->labels)
            taxonomy.require(l, "annotation for tweet " + row.tweet_id);
        inputs_vec.push_back(PanelInput{row.tweet_id, row.ticker, row.date, it->second->tone,
                                        it->second->labels});
    }

    BuildStats build_stats;
    ExposurePanel panel = build_exposures(inputs_vec, config_.factor.attribution,
                                          config_.annotation.intensity_threshold, &build_stats);
    write_file(stage_file("factors", "exposures.csv"), panel.to_csv());

    json counts{{"panel_keys", panel.size()},
                {"unlabeled_tweets", build_stats.unlabeled},
                {"below_intensity", build_stats.below_intensity},
                {"attribution", attribution_mode_name(config_.factor.attribution)}};
    json inputs{{"aligned", digest_of(aligned_path)},
                {"annotations", digest_of(annotations_path)},
                {"taxonomy", digest_of(taxonomy_path)}};
    return finish_stage("factors", std::move(counts), std::move(inputs), timer.elapsed_ms());
}

json Pipeline::run_backtest() {
    StageTimer timer;
    std::string exposures_path = require_stage_file("factors", "exposures.csv");
    std::string prices_path = require_stage_file("ingest", "prices_clean.csv");

    ExposurePanel panel = ExposurePanel::from_csv(exposures_path);
    PriceMap prices = load_prices(prices_path);
    std::vector<Horizon> horizons = config_.horizons();

    SampleJoin join = event_samples(panel, prices, horizons);
    write_file(stage_file("backtest", "samples.csv"), samples_to_csv(join.samples, horizons));

    std::optional<EventLabel> filter;
    if (!config_.backtest.label_filter.empty())
        filter = EventLabel{config_.backtest.label_filter};

    int workers = effective_workers(config_.workers);
    json series_counts = json::object();
    for (Horizon h : horizons) {
        for (auto [mode, q] :
             {std::pair{PortfolioMode::long_short, config_.backtest.long_short_quantiles},
              std::pair{PortfolioMode::long_only, config_.backtest.long_only_quantiles}}) {
            PortfolioSeries series = portfolio_sort(panel, prices, h, q, mode, filter, workers);
            write_file(stage_file("backtest", "portfolio_" + series.descriptor + ".csv"),
                       series_to_csv(series.points));
            json diag{{"points", series.points.size()}, {"skipped_dates", series.skipped_dates}};
            if (!series.points.empty()) {
                std::vector<int> predicted(series.points.size(), 1);
                std::vector<double> realized;
                realized.reserve(series.points.size());
                for (const auto& p : series.points) realized.push_back(p.ret);
                diag["win_rate"] = win_rate(predicted, realized);
            }
            series_counts[series.descriptor] = std::move(diag);
        }
    }

    json counts{{"samples", join.samples.size()},
                {"join_misses", join.join_misses},
                {"series", std::move(series_counts)}};
    json inputs{{"exposures", digest_of(exposures_path)}, {"prices", digest_of(prices_path)}};
    return finish_stage("backtest", std::move(counts), std::move(inputs), timer.elapsed_ms());
}

json Pipeline::run_report() {
    StageTimer timer;
    std::string samples_path = require_stage_file("backtest", "samples.csv");
    std::string taxonomy_path = resolve_input(config_.paths.taxonomy, "taxonomy.txt", "taxonomy");

    std::vector<Horizon> horizons;
    std::vector<EventSample> samples = load_samples(samples_path, horizons);
    Taxonomy taxonomy = Taxonomy::load(taxonomy_path);

    json inputs{{"samples", digest_of(samples_path)}, {"taxonomy", digest_of(taxonomy_path)}};
    std::size_t table_rows = 0;
    for (Horizon h : horizons) {
        std::vector<MetricsRow> rows = metrics_for_horizon(
            samples, taxonomy, h, config_.backtest.position_mode, config_.stats.ic_mode);
        if (rows.empty()) continue;
        std::string base = "metrics_" + std::to_string(h.days) + "d";
        write_file(stage_file("report", base + ".csv"),
                   render_metrics_table(rows, TableFormat::csv));
        write_file(stage_file("report", base + ".md"),
                   render_metrics_table(rows, TableFormat::markdown));
        table_rows += rows.size();
    }

    std::vector<HorizonCell> grid = metrics_grid(samples, taxonomy, horizons,
                                                 config_.backtest.position_mode,
                                                 config_.stats.ic_mode);
    write_file(stage_file("report", "sharpe_by_horizon.csv"), sharpe_by_horizon_csv(grid));
    write_file(stage_file("report", "ic_by_horizon.csv"), ic_by_horizon_csv(grid));

    // Equity curves for every portfolio series the backtest produced.
    std::vector<fs::path> portfolio_files;
    for (const auto& entry : fs::directory_iterator(stage_dir("backtest"))) {
        std::string name = entry.path().filename().string();
        if (name.rfind("portfolio_", 0) == 0 && entry.path().extension() == ".csv")
            portfolio_files.push_back(entry.path());
    }
    std::sort(portfolio_files.begin(), portfolio_files.end());
    std::size_t curves = 0;
    for (const auto& path : portfolio_files) {
        std::string name = path.filename().string();
        std::ifstream in(path, std::ios::binary);
        CsvReader reader(in);
        auto header = reader.next(); // date,value
        PortfolioSeries series;
        while (auto rec = reader.next()) {
            if (rec->fields.size() != 2) continue;
            series.points.push_back(PortfolioPoint{
                TradingDate::parse(trim(rec->fields[0])),
                parse_double_strict(rec->fields[1], name, rec->line)});
        }
        if (series.points.empty()) continue;
        EquityCurve curve = equity_curve(series, CompoundMode::log_sum);
        std::string desc = name.substr(std::string("portfolio_").size());
        desc = desc.substr(0, desc.size() - 4);
        write_file(stage_file("report", "equity_" + desc + ".csv"), equity_to_csv(curve));
        ++curves;
    }

    json counts{{"table_rows", table_rows},
                {"grid_cells", grid.size()},
                {"equity_curves", curves}};
    return finish_stage("report", std::move(counts), std::move(inputs), timer.elapsed_ms());
}

} // namespace eventalpha
