#include "folk/grounding.hpp"

#include <fstream>
#include <thread>

#include "json.hpp"

#include "folk/errors.hpp"
#include "folk/text.hpp"

namespace folk {

using nlohmann::json;

std::string to_string(QaProvider p) {
  switch (p) {
    case QaProvider::WebSearch: return "web_search";
    case QaProvider::OfflineCorpus: return "offline_corpus";
    case QaProvider::Cache: return "cache";
    case QaProvider::LlmSelf: return "llm_self";
  }
  return "web_search";
}

QaProvider qa_provider_from_string(std::string_view s) {
  if (s == "web_search" || s == "web") return QaProvider::WebSearch;
  if (s == "offline_corpus" || s == "corpus") return QaProvider::OfflineCorpus;
  if (s == "cache") return QaProvider::Cache;
  if (s == "llm_self") return QaProvider::LlmSelf;
  throw ConfigError("unknown grounding provider: " + std::string(s));
}

std::string grounding_key(std::string_view question, std::string_view site_restriction) {
  return to_lower(normalize_ws(question)) + "\x1f" + std::string(site_restriction);
}

namespace {

GroundedQA qa_from_json(const json& j, QaProvider provider) {
  GroundedQA qa;
  qa.question = j.at("question").get<std::string>();
  qa.answer = j.at("answer").get<std::string>();
  qa.source_url = j.value("url", "");
  qa.provider = provider;
  return qa;
}

}  // namespace

OfflineCorpus OfflineCorpus::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageFailure("cannot open offline corpus: " + path.string());
  OfflineCorpus corpus;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      GroundedQA qa = qa_from_json(j, QaProvider::OfflineCorpus);
      corpus.entries_[grounding_key(qa.question, "")] = std::move(qa);
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

std::optional<GroundedQA> OfflineCorpus::find(std::string_view question) const {
  auto it = entries_.find(grounding_key(question, ""));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

CacheStore::CacheStore(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;  // fresh cache
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      GroundedQA qa = qa_from_json(j, QaProvider::Cache);
      entries_[grounding_key(qa.question, j.value("site_restriction", ""))] = std::move(qa);
    } catch (const json::exception& e) {
      throw FormatError(path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::optional<GroundedQA> CacheStore::find(std::string_view question, std::string_view site) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(grounding_key(question, site));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool CacheStore::upsert(const GroundedQA& qa, std::string_view site) {
  std::lock_guard lock(mutex_);
  std::string key = grounding_key(qa.question, site);
  auto it = entries_.find(key);
  bool is_new = it == entries_.end();
  if (!is_new && it->second.answer == qa.answer && it->second.source_url == qa.source_url)
    return false;  // identical record already cached; keep the file clean

  GroundedQA stored = qa;
  stored.provider = QaProvider::Cache;
  entries_[key] = stored;

  std::ofstream out(path_, std::ios::app);
  if (!out) throw StorageFailure("cannot write cache: " + path_.string());
  json j{{"question", qa.question},
         {"answer", qa.answer},
         {"url", qa.source_url},
         {"site_restriction", std::string(site)},
         {"cached_at", utc_timestamp()}};
  out << j.dump() << '\n';
  if (!out) throw StorageFailure("cache write failed: " + path_.string());
  return is_new;
}

std::size_t CacheStore::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::size_t warm_cache(const std::vector<GroundedQA>& qa_list,
                       const std::filesystem::path& cache_path) {
  CacheStore store(cache_path);
  std::size_t added = 0;
  for (const GroundedQA& qa : qa_list) {
    if (store.upsert(qa, "")) ++added;
  }
  return added;
}

SearchClient::SearchClient(SearchEndpoint endpoint, std::shared_ptr<HttpTransport> transport)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)) {}

std::string SearchClient::build_query(std::string_view question, const GroundingConfig& config) {
  if (config.site_restriction.empty()) return std::string(question);
  if (config.restriction_mode == GroundingConfig::RestrictionMode::SiteOperator)
    return std::string(question) + " site:" + config.site_restriction;
  return config.site_restriction + " " + std::string(question);
}

GroundedQA SearchClient::top_result(std::string_view question, const GroundingConfig& config) {
  if (!transport_) throw ProviderUnavailable("web search transport not configured");
  if (endpoint_.url.empty()) throw ProviderUnavailable("web search endpoint not configured");

  std::string url = endpoint_.url + "?engine=" + url_encode(endpoint_.engine) +
                    "&q=" + url_encode(build_query(question, config));
  if (!endpoint_.api_key.empty()) url += "&api_key=" + url_encode(endpoint_.api_key);

  HttpResponse resp;
  try {
    resp = transport_->get(url, {});
  } catch (const NetworkError& e) {
    throw ProviderUnavailable(std::string("web search failed: ") + e.what());
  }
  if (resp.status == 401 || resp.status == 403)
    throw ProviderUnavailable("web search auth failure: HTTP " + std::to_string(resp.status));
  if (resp.status != 200)
    throw ProviderUnavailable("web search HTTP " + std::to_string(resp.status));

  json j;
  try {
    j = json::parse(resp.body);
  } catch (const json::exception& e) {
    throw ProviderUnavailable(std::string("unparseable search response: ") + e.what());
  }

  std::string answer;
  std::string link;
  if (config.prefer_answer_box && j.contains("answer_box") && j["answer_box"].is_object()) {
    const json& box = j["answer_box"];
    for (const char* field : {"answer", "snippet", "result"}) {
      if (box.contains(field) && box[field].is_string() && !box[field].get<std::string>().empty()) {
        answer = box[field].get<std::string>();
        break;
      }
    }
    if (box.contains("link") && box["link"].is_string()) link = box["link"].get<std::string>();
  }
  if (j.contains("organic_results") && j["organic_results"].is_array() &&
      !j["organic_results"].empty()) {
    const json& top = j["organic_results"][0];
    if (answer.empty() && top.contains("snippet") && top["snippet"].is_string())
      answer = top["snippet"].get<std::string>();
    if (link.empty() && top.contains("link") && top["link"].is_string())
      link = top["link"].get<std::string>();
  }
  if (answer.empty()) throw GroundingMiss("no usable search result for: " + std::string(question));

  GroundedQA qa;
  qa.question = std::string(question);
  qa.answer = truncate_at_word(answer, static_cast<std::size_t>(config.snippet_max_chars));
  qa.source_url = link;
  qa.provider = QaProvider::WebSearch;
  return qa;
}

Grounder::Grounder(GroundingConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)) {
  if (config_.snippet_max_chars < 64) throw ConfigError("snippet_max_chars must be >= 64");
  if (!config_.corpus_path.empty()) corpus_ = OfflineCorpus::load(config_.corpus_path);
  if (!config_.cache_path.empty()) cache_ = std::make_unique<CacheStore>(config_.cache_path);
  if (transport) search_ = std::make_unique<SearchClient>(config_.search, std::move(transport));
}

void Grounder::rate_limit() {
  using clock = std::chrono::steady_clock;
  std::chrono::duration<double> interval(1.0 / std::max(config_.requests_per_second, 0.001));
  clock::time_point wait_until;
  {
    std::lock_guard lock(rate_mutex_);
    clock::time_point now = clock::now();
    if (next_allowed_ < now) next_allowed_ = now;
    wait_until = next_allowed_;
    next_allowed_ += std::chrono::duration_cast<clock::duration>(interval);
  }
  std::this_thread::sleep_until(wait_until);
}

GroundedQA Grounder::ground(const std::string& question) {
  calls_++;
  if (trim(question).empty()) throw GroundingMiss("empty question");

  std::string web_failure;
  for (QaProvider provider : config_.provider_order) {
    switch (provider) {
      case QaProvider::Cache: {
        if (!cache_) break;
        auto hit = cache_->find(question, config_.site_restriction);
        if (hit && !hit->answer.empty()) return *hit;
        break;
      }
      case QaProvider::OfflineCorpus: {
        if (!corpus_) break;
        auto hit = corpus_->find(question);
        // an empty answer can never satisfy the success contract
        if (hit && !hit->answer.empty()) {
          if (cache_) cache_->upsert(*hit, config_.site_restriction);
          return *hit;
        }
        break;
      }
      case QaProvider::WebSearch: {
        if (!search_) break;
        web_calls_++;
        rate_limit();
        try {
          GroundedQA qa = search_->top_result(question, config_);
          if (cache_) cache_->upsert(qa, config_.site_restriction);
          return qa;
        } catch (const GroundingMiss&) {
          // searched but found nothing; later providers may still answer
        } catch (const ProviderUnavailable& e) {
          web_failure = e.what();
        }
        break;
      }
      case QaProvider::LlmSelf:
        break;  // self-answers are produced by the pipeline, not the grounder
    }
  }
  if (!web_failure.empty()) throw ProviderUnavailable(web_failure);
  throw GroundingMiss("no provider produced an answer for: " + question);
}

}  // namespace folk
