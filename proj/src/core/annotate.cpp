#include "core/annotate.hpp"

#include "core/csv.hpp"
#include "core/digest.hpp"
#include "core/errors.hpp"
#include "core/log.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace eventalpha {

using nlohmann::json;

Lexicon Lexicon::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("IoError", "cannot open lexicon file: " + path);
    CsvReader reader(in);
    auto header = reader.next();
    if (!header || header->fields.size() < 2 || to_lower(trim(header->fields[0])) != "term")
        fail_validation("BadHeader", path + ": expected header 'term,weight'");
    Lexicon lex;
    while (auto rec = reader.next()) {
        if (rec->fields.size() == 1 && trim(rec->fields[0]).empty()) continue;
        if (rec->fields.size() != 2)
            fail_validation("BadRow", path + ": wrong field count at line " + std::to_string(rec->line));
        std::string term = to_lower(trim(rec->fields[0]));
        double w = parse_double_strict(rec->fields[1], path, rec->line);
        if (term.empty())
            fail_validation("BadRow", path + ": empty term at line " + std::to_string(rec->line));
        if (!lex.weights.emplace(term, w).second)
            fail_validation("DuplicateTerm", path + ": duplicate term '" + term + "' at line " +
                                                 std::to_string(rec->line));
    }
    return lex;
}

namespace {

template <class Fn>
void for_each_token(const std::string& text, Fn&& fn) {
    std::string token;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!token.empty()) {
            fn(token);
            token.clear();
        }
    }
    if (!token.empty()) fn(token);
}

} // namespace

double score_tone_lexicon(const std::string& text, const Lexicon& lexicon) {
    if (lexicon.weights.empty()) fail_validation("EmptyLexicon", "lexicon has no terms");
    double sum = 0;
    std::size_t matched = 0;
    for_each_token(text, [&](const std::string& tok) {
        auto it = lexicon.weights.find(tok);
        if (it != lexicon.weights.end()) {
            sum += it->second;
            ++matched;
        }
    });
    if (matched == 0) return 0.0;
    return std::clamp(sum / static_cast<double>(matched), -1.0, 1.0);
}

KeywordMap load_keyword_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("IoError", "cannot open keyword file: " + path);
    CsvReader reader(in);
    auto header = reader.next();
    if (!header || header->fields.size() < 2 || to_lower(trim(header->fields[0])) != "label")
        fail_validation("BadHeader", path + ": expected header 'label,keyword'");
    KeywordMap map;
    while (auto rec = reader.next()) {
        if (rec->fields.size() == 1 && trim(rec->fields[0]).empty()) continue;
        if (rec->fields.size() != 2)
            fail_validation("BadRow", path + ": wrong field count at line " + std::to_string(rec->line));
        map[EventLabel{std::string(trim(rec->fields[0]))}].push_back(
            std::string(trim(rec->fields[1])));
    }
    return map;
}

std::set<EventLabel> tag_events_mock(const Tweet& tweet, const KeywordMap& keyword_map,
                                     const Taxonomy& taxonomy) {
    for (const auto& [label, keywords] : keyword_map)
        if (!taxonomy.contains(label))
            fail_validation("UnknownLabelInMap", "keyword map labels '" + label.name +
                                                     "' which is not in the taxonomy");
    std::string haystack = to_lower(tweet.text);
    std::set<EventLabel> out;
    for (const auto& [label, keywords] : keyword_map)
        for (const auto& kw : keywords)
            if (!kw.empty() && haystack.find(to_lower(kw)) != std::string::npos) {
                out.insert(label);
                break;
            }
    return out;
}

PromptTemplate PromptTemplate::make(std::string text, std::string version) {
    for (const char* ph : {"{taxonomy}", "{tweet_text}"}) {
        auto first = text.find(ph);
        if (first == std::string::npos)
            fail_validation("MissingPlaceholder",
                            std::string("prompt template lacks placeholder ") + ph);
        if (text.find(ph, first + 1) != std::string::npos)
            fail_validation("MissingPlaceholder",
                            std::string("prompt template repeats placeholder ") + ph);
    }
    return PromptTemplate{std::move(text), std::move(version)};
}

std::string build_prompt(const PromptTemplate& tmpl, std::span<const EventLabel> taxonomy,
                         const Tweet& tweet) {
    if (taxonomy.empty()) fail_validation("EmptyTaxonomy", "prompt needs a non-empty taxonomy");
    std::string labels;
    for (std::size_t i = 0; i < taxonomy.size(); ++i) {
        if (i) labels.push_back('\n');
        labels += taxonomy[i].name;
    }
    std::string out = tmpl.text;
    auto replace_once = [&](const std::string& ph, const std::string& value) {
        auto pos = out.find(ph);
        out.replace(pos, ph.size(), value);
    };
    replace_once("{taxonomy}", labels);
    replace_once("{tweet_text}", tweet.text);
    return out;
}

namespace {

// Scans for the end of a balanced JSON object starting at '{', honoring
// string literals and escapes. Returns npos when unbalanced.
std::size_t balanced_object_end(const std::string& s, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{') ++depth;
        else if (c == '}') {
            if (--depth == 0) return i;
        }
    }
    return std::string::npos;
}

} // namespace

ParsedResponse parse_llm_response(const std::string& raw, const Taxonomy& taxonomy,
                                  UnknownLabelPolicy policy) {
    for (std::size_t pos = raw.find('{'); pos != std::string::npos;
         pos = raw.find('{', pos + 1)) {
        std::size_t end = balanced_object_end(raw, pos);
        if (end == std::string::npos) continue;
        json obj = json::parse(raw.substr(pos, end - pos + 1), nullptr, /*allow_exceptions=*/false);
        if (!obj.is_object() || !obj.contains("labels") || !obj["labels"].is_array()) continue;
        bool shape_ok = true;
        for (const auto& item : obj["labels"])
            if (!item.is_string()) shape_ok = false;
        if (obj.contains("tone") && !obj["tone"].is_number()) shape_ok = false;
        if (!shape_ok) continue;

        ParsedResponse out;
        for (const auto& item : obj["labels"]) {
            EventLabel label{item.get<std::string>()};
            if (taxonomy.contains(label)) {
                out.labels.insert(std::move(label));
            } else if (policy == UnknownLabelPolicy::error) {
                fail_validation("UnknownLabel", "response label not in taxonomy: " + label.name);
            }
            // policy == drop: filtered out
        }
        if (obj.contains("tone"))
            out.tone = std::clamp(obj["tone"].get<double>(), -1.0, 1.0);
        return out;
    }
    fail_upstream("MalformedResponse", "no JSON object with a 'labels' array in response");
}

std::string prompt_hash(const std::string& model_id, const std::string& template_version,
                        const std::string& tweet_text) {
    std::uint64_t h = fnv1a64(model_id);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(template_version, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(tweet_text, h);
    return to_hex(h);
}

AnnotationCache AnnotationCache::open(const std::string& path) {
    AnnotationCache cache;
    cache.path_ = path;
    std::ifstream in(path, std::ios::binary);
    if (!in) return cache; // fresh cache; file created on first append

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) lines.push_back(line);
    }
    in.close();

    auto parse_entry = [](const std::string& text) -> std::optional<CacheEntry> {
        json obj = json::parse(text, nullptr, /*allow_exceptions=*/false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("tweet_id") ||
            !obj.contains("prompt_hash") || !obj.contains("labels") || !obj["labels"].is_array() ||
            !obj.contains("model_id"))
            return std::nullopt;
        CacheEntry e;
        e.tweet_id = obj["tweet_id"].get<std::string>();
        e.prompt_hash = obj["prompt_hash"].get<std::string>();
        e.model_id = obj["model_id"].get<std::string>();
        if (obj.contains("tone") && obj["tone"].is_number()) e.tone = obj["tone"].get<double>();
        for (const auto& l : obj["labels"]) e.labels.push_back(EventLabel{l.get<std::string>()});
        return e;
    };

    std::string good_prefix;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto entry = parse_entry(lines[i]);
        if (!entry) {
            // A torn final line is expected after an interrupted run; a
            // corrupt interior line means the journal is unusable.
            if (i + 1 != lines.size())
                fail_validation("CorruptCache",
                                path + ": unparseable journal line " + std::to_string(i + 1));
            log_line(LogLevel::warn, "truncating corrupt trailing cache line in " + path);
            write_file(path, good_prefix);
            return cache;
        }
        auto key = std::make_pair(entry->tweet_id, entry->prompt_hash);
        if (cache.entries_.count(key))
            fail_validation("DuplicateCacheEntry", "cache has duplicate key for tweet '" +
                                                       entry->tweet_id + "' in " + path);
        good_prefix += lines[i];
        good_prefix += '\n';
        cache.entries_.emplace(std::move(key), std::move(*entry));
    }
    return cache;
}

const CacheEntry* AnnotationCache::find(const std::string& tweet_id,
                                        const std::string& hash) const {
    auto it = entries_.find(std::make_pair(tweet_id, hash));
    return it == entries_.end() ? nullptr : &it->second;
}

void AnnotationCache::append(const CacheEntry& entry) {
    auto key = std::make_pair(entry.tweet_id, entry.prompt_hash);
    if (entries_.count(key))
        fail_validation("DuplicateCacheEntry",
                        "cache already holds an entry for tweet '" + entry.tweet_id + "'");
    json obj;
    obj["tweet_id"] = entry.tweet_id;
    obj["prompt_hash"] = entry.prompt_hash;
    if (entry.tone) obj["tone"] = *entry.tone;
    json labels = json::array();
    for (const auto& l : entry.labels) labels.push_back(l.name);
    obj["labels"] = std::move(labels);
    obj["model_id"] = entry.model_id;

    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) fail_io("IoError", "cannot append to cache file: " + path_);
    out << obj.dump() << '\n';
    if (!out) fail_io("IoError", "cache write failed: " + path_);
    entries_.emplace(std::move(key), entry);
}

namespace {

Annotation annotation_from(const Tweet& tweet, const std::optional<double>& tone,
                           std::set<EventLabel> labels, const Lexicon& fallback) {
    double t = tone ? *tone : score_tone_lexicon(tweet.text, fallback);
    return Annotation::make(tweet.id, t, std::move(labels));
}

struct FetchResult {
    bool ok = false;
    std::optional<double> tone;
    std::set<EventLabel> labels;
    std::string error;
    std::exception_ptr fatal; // validation failures are never absorbed by fail-soft
};

FetchResult fetch_one(const Tweet& tweet, const Taxonomy& taxonomy, const LlmClientConfig& cfg,
                      HttpTransport& transport, std::atomic<std::size_t>& requests) {
    json body;
    body["model"] = cfg.model_id;
    body["prompt"] = build_prompt(cfg.prompt_template, taxonomy.labels(), tweet);
    std::string payload = body.dump();

    FetchResult out;
    for (int attempt = 0;; ++attempt) {
        ++requests;
        auto resp = transport.post(cfg.url, payload, cfg.auth_token);
        bool retryable = !resp.transport_ok || resp.status == 429;
        if (resp.transport_ok && resp.status == 200) {
            try {
                ParsedResponse parsed = parse_llm_response(resp.body, taxonomy, cfg.policy);
                out.ok = true;
                out.tone = parsed.tone;
                out.labels = std::move(parsed.labels);
            } catch (const Error& e) {
                if (e.cls() == ErrClass::validation)
                    out.fatal = std::current_exception();
                else
                    out.error = e.what();
            }
            return out;
        }
        if (!retryable) {
            out.error = "unexpected HTTP status " + std::to_string(resp.status);
            return out;
        }
        if (attempt >= cfg.retry_attempts) {
            out.error = resp.transport_ok ? "rate limited after retries"
                                          : "transport error after retries: " + resp.error;
            return out;
        }
        auto delay = std::chrono::milliseconds(
            static_cast<long long>(cfg.retry_base_ms) << attempt);
        if (delay.count() > 0) std::this_thread::sleep_for(delay);
    }
}

} // namespace

std::vector<Annotation> annotate_llm(std::span<const Tweet> tweets, const Taxonomy& taxonomy,
                                     const Lexicon& fallback_lexicon, const LlmClientConfig& config,
                                     AnnotationCache& cache, HttpTransport& transport,
                                     AnnotateStats* stats) {
    if (config.url.empty())
        fail_validation("MissingEndpoint", "LLM endpoint URL is not configured");

    std::vector<Annotation> out;
    out.reserve(tweets.size());
    std::vector<std::string> hashes(tweets.size());
    std::vector<std::size_t> misses;
    AnnotateStats local;

    for (std::size_t i = 0; i < tweets.size(); ++i) {
        hashes[i] = prompt_hash(config.model_id, config.prompt_template.version, tweets[i].text);
        if (const CacheEntry* hit = cache.find(tweets[i].id, hashes[i])) {
            ++local.cache_hits;
            std::set<EventLabel> labels(hit->labels.begin(), hit->labels.end());
            for (const auto& l : labels)
                taxonomy.require(l, "cached annotation for tweet " + tweets[i].id);
            out.push_back(annotation_from(tweets[i], hit->tone, std::move(labels), fallback_lexicon));
        } else {
            misses.push_back(i);
            out.push_back(Annotation{tweets[i].id, 0.0, {}}); // placeholder, filled below
        }
    }

    std::vector<FetchResult> fetched(misses.size());
    std::atomic<std::size_t> requests{0};
    std::atomic<std::size_t> cursor{0};
    std::size_t n_workers =
        std::min<std::size_t>(std::max(1, config.max_in_flight), misses.size());
    std::vector<std::thread> workers;
    workers.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w)
        workers.emplace_back([&] {
            for (;;) {
                std::size_t k = cursor.fetch_add(1);
                if (k >= misses.size()) return;
                fetched[k] = fetch_one(tweets[misses[k]], taxonomy, config, transport, requests);
            }
        });
    for (auto& w : workers) w.join();
    local.requests_sent = requests.load();

    // Results assembled and journaled in input order, so outputs do not
    // depend on completion order or worker count.
    for (std::size_t k = 0; k < misses.size(); ++k) {
        std::size_t i = misses[k];
        const Tweet& tweet = tweets[i];
        const FetchResult& r = fetched[k];
        if (r.fatal) std::rethrow_exception(r.fatal);
        if (r.ok) {
            CacheEntry entry;
            entry.tweet_id = tweet.id;
            entry.prompt_hash = hashes[i];
            entry.tone = r.tone;
            entry.labels.assign(r.labels.begin(), r.labels.end());
            entry.model_id = config.model_id;
            cache.append(entry);
            out[i] = annotation_from(tweet, r.tone, r.labels, fallback_lexicon);
        } else if (config.fail_soft) {
            ++local.failures;
            log_line(LogLevel::warn, "annotation failed for tweet " + tweet.id + ": " + r.error);
            out[i] = Annotation::make(tweet.id, score_tone_lexicon(tweet.text, fallback_lexicon), {});
        } else {
            fail_upstream("NetworkError",
                          "annotation failed for tweet " + tweet.id + ": " + r.error);
        }
    }
    if (local.failures > 0)
        log_line(LogLevel::warn, std::to_string(local.failures) + " tweet(s) fell back to lexicon tone");
    if (stats) *stats = local;
    return out;
}

std::vector<Annotation> annotate_mock(std::span<const Tweet> tweets, const KeywordMap& keyword_map,
                                      const Taxonomy& taxonomy, const Lexicon& lexicon) {
    std::vector<Annotation> out;
    out.reserve(tweets.size());
    for (const Tweet& t : tweets)
        out.push_back(Annotation::make(t.id, score_tone_lexicon(t.text, lexicon),
                                       tag_events_mock(t, keyword_map, taxonomy)));
    return out;
}

std::vector<Annotation> annotate_replay(std::span<const Tweet> tweets, const Taxonomy& taxonomy,
                                        const Lexicon& fallback_lexicon,
                                        const LlmClientConfig& config, const AnnotationCache& cache,
                                        AnnotateStats* stats) {
    std::vector<Annotation> out;
    out.reserve(tweets.size());
    AnnotateStats local;
    for (const Tweet& tweet : tweets) {
        std::string hash =
            prompt_hash(config.model_id, config.prompt_template.version, tweet.text);
        const CacheEntry* hit = cache.find(tweet.id, hash);
        if (!hit)
            fail_validation("UncachedTweet",
                            "replay backend: no cache entry for tweet '" + tweet.id + "'");
        ++local.cache_hits;
        std::set<EventLabel> labels(hit->labels.begin(), hit->labels.end());
        for (const auto& l : labels) taxonomy.require(l, "cached annotation for " + tweet.id);
        out.push_back(annotation_from(tweet, hit->tone, std::move(labels), fallback_lexicon));
    }
    if (stats) *stats = local;
    return out;
}

} // namespace eventalpha
