#include "folk/llm.hpp"

#include <fstream>
#include <thread>

#include "json.hpp"

#include "folk/digest.hpp"
#include "folk/errors.hpp"
#include "folk/text.hpp"

namespace folk {

using nlohmann::json;

std::string to_string(BackendKind k) {
  switch (k) {
    case BackendKind::Live: return "live";
    case BackendKind::Replay: return "replay";
    case BackendKind::Scripted: return "scripted";
  }
  return "scripted";
}

std::string CompletionRequest::tag() const {
  Sha256 h;
  h.update(model_id);
  h.update("\x00", 1);
  h.update(prompt);
  for (const std::string& stop : stop_sequences) {
    h.update("\x00", 1);
    h.update(stop);
  }
  return to_hex(h.finish());
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses) {
  for (std::string& r : responses) queue_.push_back(std::move(r));
}

void ScriptedBackend::push(std::string response) {
  std::lock_guard lock(mutex_);
  queue_.push_back(std::move(response));
}

CompletionResult ScriptedBackend::complete(const CompletionRequest&) {
  calls_++;
  std::lock_guard lock(mutex_);
  if (queue_.empty()) throw BackendUnavailable("scripted backend exhausted");
  CompletionResult result;
  result.text = std::move(queue_.front());
  queue_.pop_front();
  result.backend = BackendKind::Scripted;
  return result;
}

namespace {

json usage_to_json(const std::optional<TokenUsage>& usage) {
  if (!usage) return nullptr;
  return json{{"prompt_tokens", usage->prompt_tokens},
              {"completion_tokens", usage->completion_tokens}};
}

std::optional<TokenUsage> usage_from_json(const json& j) {
  if (!j.is_object()) return std::nullopt;
  TokenUsage u;
  u.prompt_tokens = j.value("prompt_tokens", 0L);
  u.completion_tokens = j.value("completion_tokens", 0L);
  return u;
}

}  // namespace

ReplayStore ReplayStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageFailure("cannot open replay store: " + path.string());
  ReplayStore store;
  store.path_ = path;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (j.value("type", "") == "manifest") continue;
    if (!j.contains("tag"))
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": record without tag");
    ReplayRecord rec;
    rec.tag = j.at("tag").get<std::string>();
    rec.model_id = j.value("model_id", "");
    rec.prompt = j.value("prompt", "");
    rec.completion = j.value("completion", "");
    rec.recorded_at = j.value("recorded_at", "");
    if (j.contains("stops") && j["stops"].is_array())
      rec.stops = j["stops"].get<std::vector<std::string>>();
    if (j.contains("token_usage")) rec.token_usage = usage_from_json(j["token_usage"]);
    store.records_[rec.tag] = std::move(rec);
  }
  store.file_digest_ = sha256_file(path);
  return store;
}

const ReplayRecord* ReplayStore::find(const std::string& tag) const {
  auto it = records_.find(tag);
  return it == records_.end() ? nullptr : &it->second;
}

CompletionResult ReplayBackend::complete(const CompletionRequest& request) {
  const ReplayRecord* rec = store_.find(request.tag());
  if (!rec)
    throw ReplayMiss("no recorded completion for tag " + request.tag() +
                     " (fixture store is stale relative to the prompts)");
  CompletionResult result;
  result.text = rec->completion;
  result.backend = BackendKind::Replay;
  result.latency_ms = 0;
  result.token_usage = rec->token_usage;
  return result;
}

AdapterMapping AdapterMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageFailure("cannot open adapter mapping: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  AdapterMapping m;
  m.model_field = j.value("model_field", m.model_field);
  m.prompt_field = j.value("prompt_field", m.prompt_field);
  m.max_tokens_field = j.value("max_tokens_field", m.max_tokens_field);
  m.temperature_field = j.value("temperature_field", m.temperature_field);
  m.stop_field = j.value("stop_field", m.stop_field);
  m.completion_pointer = j.value("completion_pointer", m.completion_pointer);
  m.prompt_tokens_pointer = j.value("prompt_tokens_pointer", m.prompt_tokens_pointer);
  m.completion_tokens_pointer = j.value("completion_tokens_pointer", m.completion_tokens_pointer);
  return m;
}

LiveBackend::LiveBackend(LiveConfig config, std::shared_ptr<HttpTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (config_.url.empty()) throw ConfigError("live backend requires LLM_API_URL");
  if (!transport_) throw ConfigError("live backend requires a transport");
}

CompletionResult LiveBackend::complete(const CompletionRequest& request) {
  const AdapterMapping& m = config_.mapping;
  json body;
  body[m.model_field] = request.model_id;
  body[m.prompt_field] = request.prompt;
  body[m.max_tokens_field] = request.max_tokens;
  body[m.temperature_field] = request.temperature;
  if (!request.stop_sequences.empty()) body[m.stop_field] = request.stop_sequences;

  std::vector<HttpHeader> headers;
  if (!config_.api_key.empty())
    headers.push_back({"Authorization", "Bearer " + config_.api_key});

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(config_.initial_backoff * (1L << (attempt - 1)));
    HttpResponse resp;
    try {
      resp = transport_->post(config_.url, headers, body.dump(), "application/json");
    } catch (const NetworkError& e) {
      last_error = e.what();
      continue;
    }
    if (resp.status == 429 || resp.status >= 500) {
      last_error = "HTTP " + std::to_string(resp.status);
      continue;
    }
    if (resp.status != 200)
      throw BackendUnavailable("completion endpoint returned HTTP " + std::to_string(resp.status) +
                               ": " + truncate_at_word(resp.body, 200));
    json j;
    try {
      j = json::parse(resp.body);
    } catch (const json::exception& e) {
      throw BackendUnavailable(std::string("unparseable completion response: ") + e.what());
    }
    CompletionResult result;
    try {
      result.text = j.at(json::json_pointer(m.completion_pointer)).get<std::string>();
    } catch (const json::exception&) {
      throw BackendUnavailable("completion response missing " + m.completion_pointer);
    }
    TokenUsage usage;
    bool have_usage = false;
    if (j.contains(json::json_pointer(m.prompt_tokens_pointer))) {
      usage.prompt_tokens = j.at(json::json_pointer(m.prompt_tokens_pointer)).get<long>();
      have_usage = true;
    }
    if (j.contains(json::json_pointer(m.completion_tokens_pointer))) {
      usage.completion_tokens = j.at(json::json_pointer(m.completion_tokens_pointer)).get<long>();
      have_usage = true;
    }
    if (have_usage) result.token_usage = usage;
    result.backend = BackendKind::Live;
    return result;
  }
  throw BackendUnavailable("completion endpoint unreachable after " +
                           std::to_string(config_.max_retries) + " retries: " + last_error);
}

TraceRecorder::TraceRecorder(std::filesystem::path path) : path_(std::move(path)) {
  std::ofstream out(path_, std::ios::trunc);
  if (!out) throw StorageFailure("cannot open recording file: " + path_.string());
}

void TraceRecorder::append(const CompletionRequest& request, const CompletionResult& result) {
  std::lock_guard lock(mutex_);
  if (finalized_) throw StorageFailure("recording already finalized: " + path_.string());
  std::ofstream out(path_, std::ios::app);
  if (!out) throw StorageFailure("cannot append to recording: " + path_.string());
  json j{{"tag", request.tag()},
         {"model_id", request.model_id},
         {"prompt", request.prompt},
         {"stops", request.stop_sequences},
         {"completion", result.text},
         {"recorded_at", utc_timestamp()},
         {"token_usage", usage_to_json(result.token_usage)}};
  out << j.dump() << '\n';
  if (!out) throw StorageFailure("write failed: " + path_.string());
}

std::filesystem::path TraceRecorder::finalize() {
  std::lock_guard lock(mutex_);
  finalized_ = true;
  return path_;
}

Gateway::Gateway(std::shared_ptr<CompletionBackend> backend) : backend_(std::move(backend)) {
  if (!backend_) throw ConfigError("gateway requires a backend");
}

CompletionResult Gateway::complete(const CompletionRequest& request) {
  calls_++;
  auto t0 = std::chrono::steady_clock::now();
  CompletionResult result = backend_->complete(request);
  if (result.backend != BackendKind::Replay) {
    result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
  }
  {
    std::lock_guard lock(recorder_mutex_);
    if (recorder_) recorder_->append(request, result);
  }
  return result;
}

void Gateway::record_session(const std::filesystem::path& trace_path) {
  std::lock_guard lock(recorder_mutex_);
  if (backend_->kind() == BackendKind::Replay)
    throw ConfigError("recording a replay session would copy the fixture store onto itself");
  recorder_ = std::make_unique<TraceRecorder>(trace_path);
}

std::filesystem::path Gateway::finalize_session() {
  std::lock_guard lock(recorder_mutex_);
  if (!recorder_) throw ConfigError("no recording session active");
  std::filesystem::path path = recorder_->finalize();
  recorder_.reset();
  return path;
}

bool Gateway::recording() const {
  std::lock_guard lock(recorder_mutex_);
  return recorder_ != nullptr;
}

}  // namespace folk
