#pragma once

#include "core/domain.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace eventalpha {

// Lowercased term -> weight. Loaded from CSV `term,weight`.
struct Lexicon {
    std::map<std::string, double> weights;

    static Lexicon load(const std::string& path);
};

// Mean weight of matched tokens (tokens split on any non-alphanumeric
// character, lowercased), clamped to [-1, 1]; 0 when nothing matches.
double score_tone_lexicon(const std::string& text, const Lexicon& lexicon);

using KeywordMap = std::map<EventLabel, std::vector<std::string>>;

// CSV `label,keyword`, one keyword per row; labels may repeat.
KeywordMap load_keyword_map(const std::string& path);

// A label applies iff any of its keywords occurs case-insensitively in
// the text. Throws UnknownLabelInMap when the map names a label outside
// the taxonomy.
std::set<EventLabel> tag_events_mock(const Tweet& tweet, const KeywordMap& keyword_map,
                                     const Taxonomy& taxonomy);

// Template text with {taxonomy} and {tweet_text}, each exactly once.
struct PromptTemplate {
    std::string text;
    std::string version;

    static PromptTemplate make(std::string text, std::string version); // throws MissingPlaceholder
};

std::string build_prompt(const PromptTemplate& tmpl, std::span<const EventLabel> taxonomy,
                         const Tweet& tweet);

enum class UnknownLabelPolicy { drop, error };

struct ParsedResponse {
    std::set<EventLabel> labels;
    std::optional<double> tone; // clamped to [-1, 1] when present
};

// Extracts the first JSON object in raw shaped {"labels":[...]} with an
// optional numeric "tone"; leading/trailing prose is tolerated. Labels
// outside the taxonomy are dropped or rejected per policy.
ParsedResponse parse_llm_response(const std::string& raw, const Taxonomy& taxonomy,
                                  UnknownLabelPolicy policy);

std::string prompt_hash(const std::string& model_id, const std::string& template_version,
                        const std::string& tweet_text);

struct CacheEntry {
    std::string tweet_id;
    std::string prompt_hash;
    std::optional<double> tone; // absent when the response omitted it
    std::vector<EventLabel> labels;
    std::string model_id;
};

// Append-only JSON-lines journal keyed by (tweet_id, prompt_hash). A
// corrupt trailing line is tolerated and truncated on open.
class AnnotationCache {
public:
    static AnnotationCache open(const std::string& path);

    const CacheEntry* find(const std::string& tweet_id, const std::string& hash) const;
    void append(const CacheEntry& entry); // writes through to disk
    std::size_t size() const { return entries_.size(); }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::map<std::pair<std::string, std::string>, CacheEntry> entries_;
};

// Transport seam: the default implementation speaks HTTP POST via
// cpp-httplib; tests may substitute a fake.
class HttpTransport {
public:
    struct Response {
        bool transport_ok = false;
        int status = 0;
        std::string body;
        std::string error;
    };

    virtual ~HttpTransport() = default;
    virtual Response post(const std::string& url, const std::string& body,
                          const std::string& auth_token) = 0;
};

std::unique_ptr<HttpTransport> make_http_transport(int timeout_seconds);

struct LlmClientConfig {
    std::string url;
    std::string auth_token;
    std::string model_id = "default-model";
    PromptTemplate prompt_template;
    UnknownLabelPolicy policy = UnknownLabelPolicy::drop;
    int max_in_flight = 8;
    int retry_attempts = 4;   // retries after the initial attempt
    int retry_base_ms = 1000; // 1s, 2s, 4s, 8s
    bool fail_soft = true;
};

struct AnnotateStats {
    std::size_t requests_sent = 0;
    std::size_t cache_hits = 0;
    std::size_t failures = 0; // fail-soft fallbacks
};

// One annotation per tweet, in input order. Cache hits issue no request;
// misses fan out with bounded concurrency and are journaled in input
// order. Tone falls back to the lexicon when a response omits it.
std::vector<Annotation> annotate_llm(std::span<const Tweet> tweets, const Taxonomy& taxonomy,
                                     const Lexicon& fallback_lexicon, const LlmClientConfig& config,
                                     AnnotationCache& cache, HttpTransport& transport,
                                     AnnotateStats* stats = nullptr);

// Deterministic offline backend: keyword tagging + lexicon tone.
std::vector<Annotation> annotate_mock(std::span<const Tweet> tweets, const KeywordMap& keyword_map,
                                      const Taxonomy& taxonomy, const Lexicon& lexicon);

// Cache-only backend; fails on the first uncached tweet.
std::vector<Annotation> annotate_replay(std::span<const Tweet> tweets, const Taxonomy& taxonomy,
                                        const Lexicon& fallback_lexicon,
                                        const LlmClientConfig& config, const AnnotationCache& cache,
                                        AnnotateStats* stats = nullptr);

inline const char* kDefaultPromptTemplate =
    "You are a financial event classifier. Valid event labels:\n"
    "{taxonomy}\n"
    "Classify the tweet below. Respond with a JSON object of the form\n"
    "{\"labels\": [<applicable labels>], \"tone\": <number in [-1,1]>}.\n"
    "Tweet: {tweet_text}\n";

} // namespace eventalpha
