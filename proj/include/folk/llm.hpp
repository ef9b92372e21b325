#ifndef FOLK_LLM_HPP
#define FOLK_LLM_HPP

#include <atomic>
#include <chrono>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "folk/http.hpp"

namespace folk {

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct CompletionRequest {
  std::string model_id;
  std::string prompt;
  int max_tokens = 512;
  double temperature = 0.0;
  std::vector<std::string> stop_sequences;

  // Stable replay key: SHA-256 over (model_id, prompt, stop_sequences).
  // Sampling parameters are deliberately excluded so fixtures recorded at one
  // token budget replay under another.
  std::string tag() const;
};

enum class BackendKind { Live, Replay, Scripted };

std::string to_string(BackendKind k);

struct CompletionResult {
  std::string text;
  BackendKind backend = BackendKind::Scripted;
  long latency_ms = 0;
  std::optional<TokenUsage> token_usage;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual CompletionResult complete(const CompletionRequest& request) = 0;
  virtual BackendKind kind() const = 0;
};

// Fixed completion queue for unit tests and offline fixture generation.
class ScriptedBackend : public CompletionBackend {
 public:
  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<std::string> responses);

  void push(std::string response);
  CompletionResult complete(const CompletionRequest& request) override;
  BackendKind kind() const override { return BackendKind::Scripted; }
  long call_count() const { return calls_; }

 private:
  std::mutex mutex_;
  std::deque<std::string> queue_;
  std::atomic<long> calls_{0};
};

struct ReplayRecord {
  std::string tag;
  std::string model_id;
  std::string prompt;
  std::vector<std::string> stops;
  std::string completion;
  std::string recorded_at;
  std::optional<TokenUsage> token_usage;
};

// Read-only store of recorded completions keyed by request tag. Duplicate
// tags keep the last record.
class ReplayStore {
 public:
  static ReplayStore load(const std::filesystem::path& path);

  const ReplayRecord* find(const std::string& tag) const;
  std::size_t size() const { return records_.size(); }
  const std::string& file_digest() const { return file_digest_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::string file_digest_;
  std::map<std::string, ReplayRecord> records_;
};

class ReplayBackend : public CompletionBackend {
 public:
  explicit ReplayBackend(ReplayStore store) : store_(std::move(store)) {}

  // Returns the recorded text verbatim with latency 0; throws ReplayMiss
  // when the tag is absent (the fixture set is stale relative to the
  // prompts).
  CompletionResult complete(const CompletionRequest& request) override;
  BackendKind kind() const override { return BackendKind::Replay; }
  const ReplayStore& store() const { return store_; }

 private:
  ReplayStore store_;
};

// Field names of the wire schema, adapter-configurable because completion
// APIs differ. The default targets the OpenAI-style completions schema.
struct AdapterMapping {
  std::string model_field = "model";
  std::string prompt_field = "prompt";
  std::string max_tokens_field = "max_tokens";
  std::string temperature_field = "temperature";
  std::string stop_field = "stop";
  std::string completion_pointer = "/choices/0/text";
  std::string prompt_tokens_pointer = "/usage/prompt_tokens";
  std::string completion_tokens_pointer = "/usage/completion_tokens";

  static AdapterMapping openai_completions() { return {}; }
  static AdapterMapping load(const std::filesystem::path& path);
};

struct LiveConfig {
  std::string url;      // LLM_API_URL
  std::string api_key;  // LLM_API_KEY
  AdapterMapping mapping;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{250};
  long timeout_ms = 120000;
};

class LiveBackend : public CompletionBackend {
 public:
  LiveBackend(LiveConfig config, std::shared_ptr<HttpTransport> transport);

  // Retries transient failures (connect errors, 429, 5xx) with exponential
  // backoff, then throws BackendUnavailable.
  CompletionResult complete(const CompletionRequest& request) override;
  BackendKind kind() const override { return BackendKind::Live; }

 private:
  LiveConfig config_;
  std::shared_ptr<HttpTransport> transport_;
};

// Append-only ndjson recording of (request, completion) pairs; the finalized
// file loads as a ReplayStore.
class TraceRecorder {
 public:
  explicit TraceRecorder(std::filesystem::path path);
  void append(const CompletionRequest& request, const CompletionResult& result);
  std::filesystem::path finalize();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  bool finalized_ = false;
};

// Uniform completion interface over the configured backend with optional
// recording and a call counter for call-shape checks.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<CompletionBackend> backend);

  CompletionResult complete(const CompletionRequest& request);

  void record_session(const std::filesystem::path& trace_path);
  std::filesystem::path finalize_session();
  bool recording() const;

  long call_count() const { return calls_; }
  BackendKind backend_kind() const { return backend_->kind(); }

 private:
  std::shared_ptr<CompletionBackend> backend_;
  mutable std::mutex recorder_mutex_;
  std::unique_ptr<TraceRecorder> recorder_;
  std::atomic<long> calls_{0};
};

}  // namespace folk

#endif  // FOLK_LLM_HPP
