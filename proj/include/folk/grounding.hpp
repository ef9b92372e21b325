#ifndef FOLK_GROUNDING_HPP
#define FOLK_GROUNDING_HPP

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "folk/http.hpp"

namespace folk {

enum class QaProvider { WebSearch, OfflineCorpus, Cache, LlmSelf };

std::string to_string(QaProvider p);
QaProvider qa_provider_from_string(std::string_view s);

// A follow-up question with its knowledge-grounded answer.
struct GroundedQA {
  std::string question;
  std::string answer;
  std::string source_url;
  QaProvider provider = QaProvider::WebSearch;
};

struct SearchEndpoint {
  std::string url;      // e.g. https://serpapi.com/search
  std::string api_key;  // from SEARCH_API_KEY unless overridden
  std::string engine = "google";
};

struct GroundingConfig {
  enum class RestrictionMode { Prefix, SiteOperator };

  std::string site_restriction;  // empty = unrestricted
  RestrictionMode restriction_mode = RestrictionMode::Prefix;
  int snippet_max_chars = 600;  // >= 64
  bool prefer_answer_box = true;
  std::filesystem::path corpus_path;  // empty = no offline corpus
  std::filesystem::path cache_path;   // empty = no cache
  std::vector<QaProvider> provider_order{QaProvider::Cache, QaProvider::OfflineCorpus,
                                         QaProvider::WebSearch};
  double requests_per_second = 2.0;
  SearchEndpoint search;
};

// Cache/corpus key: questions differing only in surrounding whitespace or
// case map to the same key.
std::string grounding_key(std::string_view question, std::string_view site_restriction);

// Newline-delimited JSON {question, answer, url}; exact normalized-question
// match.
class OfflineCorpus {
 public:
  OfflineCorpus() = default;
  static OfflineCorpus load(const std::filesystem::path& path);

  std::optional<GroundedQA> find(std::string_view question) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, GroundedQA> entries_;
};

// Persistent answer cache; append-only file, last record wins per key.
class CacheStore {
 public:
  explicit CacheStore(std::filesystem::path path);

  std::optional<GroundedQA> find(std::string_view question, std::string_view site) const;
  // Returns true when the key was new. Writes through to the backing file.
  bool upsert(const GroundedQA& qa, std::string_view site);
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<std::string, GroundedQA> entries_;
};

// Idempotent bulk upsert; returns the number of new keys.
std::size_t warm_cache(const std::vector<GroundedQA>& qa_list, const std::filesystem::path& cache_path);

// Top-1 web search over a SerpAPI-style endpoint.
class SearchClient {
 public:
  SearchClient(SearchEndpoint endpoint, std::shared_ptr<HttpTransport> transport);

  // The query string actually sent: site restriction prepended (Prefix mode)
  // or appended as a site: operator.
  static std::string build_query(std::string_view question, const GroundingConfig& config);

  // Throws GroundingMiss when the response has no usable result and
  // ProviderUnavailable on transport/auth failure.
  GroundedQA top_result(std::string_view question, const GroundingConfig& config);

 private:
  SearchEndpoint endpoint_;
  std::shared_ptr<HttpTransport> transport_;
};

// Consults providers in config order; first hit wins; successful live and
// corpus results are written through to the cache.
class Grounder {
 public:
  explicit Grounder(GroundingConfig config, std::shared_ptr<HttpTransport> transport = nullptr);

  GroundedQA ground(const std::string& question);

  long call_count() const { return calls_; }
  long web_call_count() const { return web_calls_; }
  const GroundingConfig& config() const { return config_; }

 private:
  void rate_limit();

  GroundingConfig config_;
  std::optional<OfflineCorpus> corpus_;
  std::unique_ptr<CacheStore> cache_;
  std::unique_ptr<SearchClient> search_;
  std::mutex rate_mutex_;
  std::chrono::steady_clock::time_point next_allowed_{};
  std::atomic<long> calls_{0};
  std::atomic<long> web_calls_{0};
};

}  // namespace folk

#endif  // FOLK_GROUNDING_HPP
