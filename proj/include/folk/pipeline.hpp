#ifndef FOLK_PIPELINE_HPP
#define FOLK_PIPELINE_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "folk/grounding.hpp"
#include "folk/llm.hpp"
#include "folk/prompts.hpp"

namespace folk {

enum class DatasetTag { HoVer, Feverous, SciFactOpen, Custom };
enum class Challenge { TwoHop, ThreeHop, FourHop, Numerical, MultiHop, TextAndTable, Scientific, None };

std::string to_string(DatasetTag d);
DatasetTag dataset_from_string(std::string_view s);
std::string to_string(Challenge c);
Challenge challenge_from_string(std::string_view s);

struct Claim {
  std::string id;
  std::string text;
  std::optional<Label> gold_label;  // nullopt = unlabeled
  DatasetTag dataset = DatasetTag::Custom;
  Challenge challenge = Challenge::None;
};

enum class Consistency { Consistent, LabelClauseMismatch, NotApplicable };

std::string to_string(Consistency c);

struct StageTimings {
  long decompose_ms = 0;
  long grounding_ms = 0;
  long reasoning_ms = 0;
  long total_ms = 0;
};

struct PromptRecord {
  std::string phase;  // "decompose", "self_answer" or "reason"
  std::string text;
};

// Complete record of one verification run.
struct VerdictTrace {
  Claim claim;
  Strategy strategy = Strategy::Folk;
  std::string variant;  // empty for plain runs; ablations set it
  Decomposition decomposition;
  std::vector<GroundedQA> grounded;
  std::vector<PromptRecord> prompts;
  std::vector<CompletionResult> completions;
  ParsedVerdict parsed;
  std::optional<Truth> clause_value;  // FOLK only
  Label final_label = Label::Unknown;
  Consistency consistency = Consistency::NotApplicable;
  std::vector<std::string> citations;  // distinct grounded source urls, in order
  StageTimings timings;
  std::string error;  // empty when the run completed
  std::vector<std::string> diagnostics;
};

struct PipelineConfig {
  std::string model_id = "text-davinci-003";
  int max_tokens = 512;
  double temperature = 0.0;
  std::vector<std::string> stop_sequences{std::string(kExampleSeparator)};
  long per_claim_timeout_ms = 0;  // 0 = no deadline

  nlohmann::json to_json() const;
  std::string digest() const;
};

struct PipelineServices {
  Gateway* gateway = nullptr;
  Grounder* grounder = nullptr;
  const TemplateLibrary* templates = nullptr;
};

// Runs one claim through the chosen strategy. Gateway/grounding errors are
// captured in the trace (final_label Unknown) rather than thrown, so a batch
// never aborts on one claim.
VerdictTrace verify_claim(const PipelineServices& services, const Claim& claim, Strategy strategy,
                          const PipelineConfig& config);

// Bounded worker pool; output order equals input order regardless of
// completion order.
std::vector<VerdictTrace> run_batch(const PipelineServices& services,
                                    const std::vector<Claim>& claims, Strategy strategy,
                                    const PipelineConfig& config, int parallelism);

enum class AblationVariant { CotWithFolkQuestions, SelfAskWithFolkQuestions, FolkSelfAnswers };

std::string to_string(AblationVariant v);
AblationVariant ablation_variant_from_string(std::string_view s);

// Reuses a prior FOLK run's questions (and grounded answers, for the
// cross-format variants) while rendering a different reasoning format.
// Throws MissingFolkArtifacts when no input trace carries FOLK artifacts;
// per-claim gaps become error traces.
std::vector<VerdictTrace> cross_format_run(const PipelineServices& services,
                                           const std::vector<VerdictTrace>& folk_traces,
                                           AblationVariant variant, const PipelineConfig& config);

struct RunManifest {
  int schema_version = 1;
  std::string strategy;  // strategy or ablation variant name
  std::string config_digest;
  std::map<std::string, std::string> fixture_digests;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

struct TraceFile {
  RunManifest manifest;
  std::vector<VerdictTrace> traces;
};

nlohmann::json trace_to_json(const VerdictTrace& trace);
VerdictTrace trace_from_json(const nlohmann::json& j);

void write_trace_file(const std::filesystem::path& path, const RunManifest& manifest,
                      const std::vector<VerdictTrace>& traces);
TraceFile read_trace_file(const std::filesystem::path& path);

nlohmann::json claim_to_json(const Claim& claim);
Claim claim_from_json(const nlohmann::json& j);

}  // namespace folk

#endif  // FOLK_PIPELINE_HPP
