#include "folk/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <thread>

#include "folk/digest.hpp"
#include "folk/errors.hpp"
#include "folk/text.hpp"

namespace folk {

using nlohmann::json;
using steady_clock = std::chrono::steady_clock;

std::string to_string(DatasetTag d) {
  switch (d) {
    case DatasetTag::HoVer: return "hover";
    case DatasetTag::Feverous: return "feverous";
    case DatasetTag::SciFactOpen: return "scifact_open";
    case DatasetTag::Custom: return "custom";
  }
  return "custom";
}

DatasetTag dataset_from_string(std::string_view s) {
  std::string v = to_lower(s);
  if (v == "hover") return DatasetTag::HoVer;
  if (v == "feverous") return DatasetTag::Feverous;
  if (v == "scifact_open" || v == "scifact") return DatasetTag::SciFactOpen;
  if (v == "custom" || v == "generic") return DatasetTag::Custom;
  throw ConfigError("unknown dataset: " + std::string(s));
}

std::string to_string(Challenge c) {
  switch (c) {
    case Challenge::TwoHop: return "2hop";
    case Challenge::ThreeHop: return "3hop";
    case Challenge::FourHop: return "4hop";
    case Challenge::Numerical: return "numerical";
    case Challenge::MultiHop: return "multihop";
    case Challenge::TextAndTable: return "text_and_table";
    case Challenge::Scientific: return "scientific";
    case Challenge::None: return "none";
  }
  return "none";
}

Challenge challenge_from_string(std::string_view s) {
  std::string v = to_lower(s);
  if (v == "2hop") return Challenge::TwoHop;
  if (v == "3hop") return Challenge::ThreeHop;
  if (v == "4hop") return Challenge::FourHop;
  if (v == "numerical") return Challenge::Numerical;
  if (v == "multihop") return Challenge::MultiHop;
  if (v == "text_and_table") return Challenge::TextAndTable;
  if (v == "scientific") return Challenge::Scientific;
  if (v == "none" || v.empty()) return Challenge::None;
  throw ConfigError("unknown challenge tag: " + std::string(s));
}

std::string to_string(Consistency c) {
  switch (c) {
    case Consistency::Consistent: return "Consistent";
    case Consistency::LabelClauseMismatch: return "LabelClauseMismatch";
    case Consistency::NotApplicable: return "NotApplicable";
  }
  return "NotApplicable";
}

namespace {

Consistency consistency_from_string(std::string_view s) {
  if (s == "Consistent") return Consistency::Consistent;
  if (s == "LabelClauseMismatch") return Consistency::LabelClauseMismatch;
  return Consistency::NotApplicable;
}

long elapsed_ms(steady_clock::time_point from) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(steady_clock::now() - from).count();
}

CompletionRequest make_request(const PipelineConfig& config, std::string prompt) {
  CompletionRequest req;
  req.model_id = config.model_id;
  req.prompt = std::move(prompt);
  req.max_tokens = config.max_tokens;
  req.temperature = config.temperature;
  req.stop_sequences = config.stop_sequences;
  return req;
}

void finalize_citations(VerdictTrace& trace) {
  trace.citations.clear();
  for (const GroundedQA& qa : trace.grounded) {
    if (qa.source_url.empty()) continue;
    if (std::find(trace.citations.begin(), trace.citations.end(), qa.source_url) ==
        trace.citations.end())
      trace.citations.push_back(qa.source_url);
  }
}

// The LLM sometimes restates a predicate with resolved arguments (the shots
// do this too), so judgments are matched to clause predicates by exact
// identity first, then by unique name.
void apply_judgments(VerdictTrace& trace) {
  const PredicateClause& clause = trace.decomposition.predicates;
  TruthAssignment assignment;
  for (const Predicate& p : clause.predicates)
    assignment.set(p, Truth::Unknown, "no judgment parsed for this predicate");

  std::map<std::string, int> assigned;  // identity -> judgment index
  std::vector<const PredicateJudgment*> unmatched;
  for (const PredicateJudgment& j : trace.parsed.judgments) {
    std::string id = j.predicate.identity();
    if (clause.contains(id) && !assigned.count(id)) {
      assignment.set_identity(id, j.value, j.reason);
      assigned[id] = 1;
    } else {
      unmatched.push_back(&j);
    }
  }
  for (const PredicateJudgment* j : unmatched) {
    std::string jname = normalize_ws(j->predicate.name);
    const Predicate* candidate = nullptr;
    bool unique = true;
    for (const Predicate& p : clause.predicates) {
      if (assigned.count(p.identity())) continue;
      if (normalize_ws(p.name) == jname) {
        if (candidate) unique = false;
        candidate = &p;
      }
    }
    if (candidate && unique) {
      assignment.set(*candidate, j->value, j->reason);
      assigned[candidate->identity()] = 1;
      trace.diagnostics.push_back("judgment '" + j->predicate.identity() +
                                  "' matched clause predicate '" + candidate->identity() +
                                  "' by name");
    } else {
      trace.diagnostics.push_back("judgment '" + j->predicate.identity() +
                                  "' matches no clause predicate");
    }
  }

  trace.clause_value = evaluate_clause(clause, assignment);
}

void finalize_folk_verdict(VerdictTrace& trace) {
  apply_judgments(trace);
  trace.final_label = trace.parsed.label;
  bool consistent = (trace.clause_value == Truth::True && trace.final_label == Label::Supported) ||
                    (trace.clause_value == Truth::False && trace.final_label == Label::NotSupported);
  trace.consistency = consistent ? Consistency::Consistent : Consistency::LabelClauseMismatch;
}

struct Deadline {
  steady_clock::time_point at{};
  bool enabled = false;

  static Deadline start(const PipelineConfig& config) {
    Deadline d;
    if (config.per_claim_timeout_ms > 0) {
      d.enabled = true;
      d.at = steady_clock::now() + std::chrono::milliseconds(config.per_claim_timeout_ms);
    }
    return d;
  }
  void check(const char* stage) const {
    if (enabled && steady_clock::now() > at)
      throw Error(std::string("per-claim timeout exceeded before ") + stage);
  }
};

}  // namespace

VerdictTrace verify_claim(const PipelineServices& services, const Claim& claim, Strategy strategy,
                          const PipelineConfig& config) {
  VerdictTrace trace;
  trace.claim = claim;
  trace.strategy = strategy;
  steady_clock::time_point start = steady_clock::now();
  Deadline deadline = Deadline::start(config);

  try {
    if (!services.gateway || !services.templates)
      throw ConfigError("pipeline services not configured");

    // Stage 1: decomposition (all strategies except Direct).
    if (strategy != Strategy::Direct) {
      steady_clock::time_point t0 = steady_clock::now();
      std::string prompt = build_decompose_prompt(*services.templates, strategy, claim.text);
      trace.prompts.push_back({"decompose", prompt});
      CompletionResult result = services.gateway->complete(make_request(config, prompt));
      trace.completions.push_back(result);
      trace.decomposition = parse_decomposition(strategy, result.text);
      for (const std::string& d : trace.decomposition.diagnostics) trace.diagnostics.push_back(d);
      trace.timings.decompose_ms = elapsed_ms(t0);
      deadline.check("grounding");

      // Stage 2: knowledge grounding, one call per follow-up question.
      if (!services.grounder) throw ConfigError("grounding not configured");
      steady_clock::time_point t1 = steady_clock::now();
      for (const std::string& question : trace.decomposition.questions)
        trace.grounded.push_back(services.grounder->ground(question));
      trace.timings.grounding_ms = elapsed_ms(t1);
      deadline.check("reasoning");
    }

    // Stage 3: veracity prediction and explanation.
    steady_clock::time_point t2 = steady_clock::now();
    std::string prompt = build_reasoning_prompt(*services.templates, strategy, claim.text,
                                                trace.decomposition, trace.grounded);
    trace.prompts.push_back({"reason", prompt});
    CompletionResult result = services.gateway->complete(make_request(config, prompt));
    trace.completions.push_back(result);
    trace.parsed = parse_verdict(strategy, result.text);
    for (const std::string& d : trace.parsed.diagnostics) trace.diagnostics.push_back(d);
    trace.timings.reasoning_ms = elapsed_ms(t2);

    if (strategy == Strategy::Folk) {
      finalize_folk_verdict(trace);
    } else {
      trace.final_label = trace.parsed.label;
      trace.consistency = Consistency::NotApplicable;
    }
  } catch (const std::exception& e) {
    trace.error = e.what();
    trace.final_label = Label::Unknown;
    if (strategy == Strategy::Folk) {
      if (!trace.clause_value) trace.clause_value = Truth::Unknown;
      trace.consistency = Consistency::LabelClauseMismatch;
    } else {
      trace.consistency = Consistency::NotApplicable;
    }
  }

  finalize_citations(trace);
  trace.timings.total_ms = elapsed_ms(start);
  return trace;
}

std::vector<VerdictTrace> run_batch(const PipelineServices& services,
                                    const std::vector<Claim>& claims, Strategy strategy,
                                    const PipelineConfig& config, int parallelism) {
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  std::vector<VerdictTrace> traces(claims.size());
  if (claims.empty()) return traces;

  if (parallelism == 1) {
    for (std::size_t i = 0; i < claims.size(); ++i)
      traces[i] = verify_claim(services, claims[i], strategy, config);
    return traces;
  }

  std::atomic<std::size_t> next{0};
  std::size_t workers = std::min<std::size_t>(parallelism, claims.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= claims.size()) return;
        traces[i] = verify_claim(services, claims[i], strategy, config);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  return traces;
}

std::string to_string(AblationVariant v) {
  switch (v) {
    case AblationVariant::CotWithFolkQuestions: return "cot_with_folk_questions";
    case AblationVariant::SelfAskWithFolkQuestions: return "selfask_with_folk_questions";
    case AblationVariant::FolkSelfAnswers: return "folk_self_answers";
  }
  return "cot_with_folk_questions";
}

AblationVariant ablation_variant_from_string(std::string_view s) {
  std::string v = to_lower(s);
  std::replace(v.begin(), v.end(), '-', '_');
  if (v == "cot_with_folk_questions") return AblationVariant::CotWithFolkQuestions;
  if (v == "selfask_with_folk_questions") return AblationVariant::SelfAskWithFolkQuestions;
  if (v == "folk_self_answers") return AblationVariant::FolkSelfAnswers;
  throw ConfigError("unknown ablation variant: " + std::string(s));
}

namespace {

// Minimal continuation prompt for the self-answer ablation: the decompose
// stage asked the model to answer its own questions, this re-asks for the
// answers in a parseable shape.
std::string build_self_answer_prompt(const std::string& claim,
                                     const std::vector<std::string>& questions) {
  std::string out =
      "Answer each followup question about the claim, one question per line, "
      "using the format \"Answer: <answer>\".\n\nClaim: " + claim + "\n";
  for (const std::string& q : questions) out += "Followup Question: " + q + "\n";
  out += std::string(kResponseCue) + "\n";
  return out;
}

std::vector<std::string> parse_self_answers(const std::string& completion) {
  std::vector<std::string> answers;
  for (const std::string& line : split_lines(normalize_completion(completion))) {
    std::string t = trim(line);
    if (t == kExampleSeparator) break;
    if (t.starts_with("Answer:")) answers.push_back(trim(t.substr(7)));
  }
  return answers;
}

VerdictTrace ablation_trace(const PipelineServices& services, const VerdictTrace& folk_trace,
                            AblationVariant variant, const PipelineConfig& config) {
  VerdictTrace trace;
  trace.claim = folk_trace.claim;
  trace.variant = to_string(variant);
  switch (variant) {
    case AblationVariant::CotWithFolkQuestions: trace.strategy = Strategy::CoT; break;
    case AblationVariant::SelfAskWithFolkQuestions: trace.strategy = Strategy::SelfAsk; break;
    case AblationVariant::FolkSelfAnswers: trace.strategy = Strategy::Folk; break;
  }
  steady_clock::time_point start = steady_clock::now();

  try {
    if (folk_trace.strategy != Strategy::Folk || folk_trace.decomposition.questions.empty())
      throw MissingFolkArtifacts("claim " + folk_trace.claim.id +
                                 " carries no FOLK decomposition");
    trace.decomposition = folk_trace.decomposition;

    if (variant == AblationVariant::FolkSelfAnswers) {
      if (trace.decomposition.predicates.empty())
        throw MissingFolkArtifacts("claim " + folk_trace.claim.id + " has no predicate clause");
      steady_clock::time_point t0 = steady_clock::now();
      std::string prompt =
          build_self_answer_prompt(trace.claim.text, trace.decomposition.questions);
      trace.prompts.push_back({"self_answer", prompt});
      CompletionResult result = services.gateway->complete(make_request(config, prompt));
      trace.completions.push_back(result);
      std::vector<std::string> answers = parse_self_answers(result.text);
      if (answers.empty()) throw Error("self-answer completion contained no Answer: lines");
      if (answers.size() != trace.decomposition.questions.size())
        trace.diagnostics.push_back("self-answer count mismatch: " +
                                    std::to_string(answers.size()) + " answers for " +
                                    std::to_string(trace.decomposition.questions.size()) +
                                    " questions");
      std::size_t n = std::min(answers.size(), trace.decomposition.questions.size());
      for (std::size_t i = 0; i < n; ++i) {
        GroundedQA qa;
        qa.question = trace.decomposition.questions[i];
        qa.answer = answers[i];
        qa.provider = QaProvider::LlmSelf;
        trace.grounded.push_back(std::move(qa));
      }
      trace.timings.grounding_ms = elapsed_ms(t0);
    } else {
      if (folk_trace.grounded.empty())
        throw MissingFolkArtifacts("claim " + folk_trace.claim.id +
                                   " carries no grounded answers");
      trace.grounded = folk_trace.grounded;
    }

    steady_clock::time_point t1 = steady_clock::now();
    std::string prompt = build_reasoning_prompt(*services.templates, trace.strategy,
                                                trace.claim.text, trace.decomposition,
                                                trace.grounded);
    trace.prompts.push_back({"reason", prompt});
    CompletionResult result = services.gateway->complete(make_request(config, prompt));
    trace.completions.push_back(result);
    trace.parsed = parse_verdict(trace.strategy, result.text);
    for (const std::string& d : trace.parsed.diagnostics) trace.diagnostics.push_back(d);
    trace.timings.reasoning_ms = elapsed_ms(t1);

    if (trace.strategy == Strategy::Folk) {
      finalize_folk_verdict(trace);
    } else {
      trace.final_label = trace.parsed.label;
      trace.consistency = Consistency::NotApplicable;
    }
  } catch (const std::exception& e) {
    trace.error = e.what();
    trace.final_label = Label::Unknown;
    if (trace.strategy == Strategy::Folk) {
      if (!trace.clause_value) trace.clause_value = Truth::Unknown;
      trace.consistency = Consistency::LabelClauseMismatch;
    }
  }

  finalize_citations(trace);
  trace.timings.total_ms = elapsed_ms(start);
  return trace;
}

}  // namespace

std::vector<VerdictTrace> cross_format_run(const PipelineServices& services,
                                           const std::vector<VerdictTrace>& folk_traces,
                                           AblationVariant variant, const PipelineConfig& config) {
  bool any_folk = std::any_of(folk_traces.begin(), folk_traces.end(), [](const VerdictTrace& t) {
    return t.strategy == Strategy::Folk && !t.decomposition.questions.empty();
  });
  if (!any_folk)
    throw MissingFolkArtifacts("no input trace carries a FOLK decomposition");

  std::vector<VerdictTrace> out;
  out.reserve(folk_traces.size());
  for (const VerdictTrace& t : folk_traces)
    out.push_back(ablation_trace(services, t, variant, config));
  return out;
}

json PipelineConfig::to_json() const {
  return json{{"model_id", model_id},
              {"max_tokens", max_tokens},
              {"temperature", temperature},
              {"stop_sequences", stop_sequences},
              {"per_claim_timeout_ms", per_claim_timeout_ms}};
}

std::string PipelineConfig::digest() const { return sha256_hex(to_json().dump()); }

json RunManifest::to_json() const {
  return json{{"type", "manifest"},
              {"schema_version", schema_version},
              {"strategy", strategy},
              {"config_digest", config_digest},
              {"fixture_digests", fixture_digests}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.schema_version = j.value("schema_version", 1);
  m.strategy = j.value("strategy", "");
  m.config_digest = j.value("config_digest", "");
  if (j.contains("fixture_digests") && j["fixture_digests"].is_object())
    m.fixture_digests = j["fixture_digests"].get<std::map<std::string, std::string>>();
  return m;
}

json claim_to_json(const Claim& claim) {
  return json{{"id", claim.id},
              {"text", claim.text},
              {"gold_label", claim.gold_label ? to_string(*claim.gold_label) : "Unlabeled"},
              {"dataset", to_string(claim.dataset)},
              {"challenge", to_string(claim.challenge)}};
}

Claim claim_from_json(const json& j) {
  Claim c;
  c.id = j.at("id").get<std::string>();
  c.text = j.at("text").get<std::string>();
  std::string gold = j.value("gold_label", "Unlabeled");
  if (gold != "Unlabeled") c.gold_label = label_from_string(gold);
  c.dataset = dataset_from_string(j.value("dataset", "custom"));
  c.challenge = challenge_from_string(j.value("challenge", "none"));
  return c;
}

namespace {

json predicate_to_json(const Predicate& p) {
  return json{{"name", p.name}, {"args", p.args}, {"description", p.description}};
}

Predicate predicate_from_json(const json& j) {
  Predicate p;
  p.name = j.at("name").get<std::string>();
  p.args = j.at("args").get<std::vector<std::string>>();
  p.description = j.value("description", "");
  return p;
}

json qa_to_json(const GroundedQA& qa) {
  return json{{"question", qa.question},
              {"answer", qa.answer},
              {"source_url", qa.source_url},
              {"provider", to_string(qa.provider)}};
}

GroundedQA qa_from_json(const json& j) {
  GroundedQA qa;
  qa.question = j.at("question").get<std::string>();
  qa.answer = j.at("answer").get<std::string>();
  qa.source_url = j.value("source_url", "");
  qa.provider = qa_provider_from_string(j.value("provider", "web_search"));
  return qa;
}

}  // namespace

json trace_to_json(const VerdictTrace& trace) {
  json decomposition{{"questions", trace.decomposition.questions},
                     {"diagnostics", trace.decomposition.diagnostics}};
  json predicates = json::array();
  for (const Predicate& p : trace.decomposition.predicates.predicates)
    predicates.push_back(predicate_to_json(p));
  decomposition["predicates"] = predicates;

  json grounded = json::array();
  for (const GroundedQA& qa : trace.grounded) grounded.push_back(qa_to_json(qa));

  json prompts = json::array();
  for (const PromptRecord& p : trace.prompts)
    prompts.push_back(json{{"phase", p.phase}, {"text", p.text}});

  json completions = json::array();
  for (const CompletionResult& c : trace.completions) {
    json usage = nullptr;
    if (c.token_usage)
      usage = json{{"prompt_tokens", c.token_usage->prompt_tokens},
                   {"completion_tokens", c.token_usage->completion_tokens}};
    completions.push_back(json{{"text", c.text},
                               {"backend", to_string(c.backend)},
                               {"latency_ms", c.latency_ms},
                               {"token_usage", usage}});
  }

  json judgments = json::array();
  for (const PredicateJudgment& jd : trace.parsed.judgments)
    judgments.push_back(json{{"predicate", predicate_to_json(jd.predicate)},
                             {"value", to_string(jd.value)},
                             {"reason", jd.reason}});
  json parsed{{"label", to_string(trace.parsed.label)},
              {"judgments", judgments},
              {"explanation", trace.parsed.explanation},
              {"diagnostics", trace.parsed.diagnostics}};

  return json{{"type", "trace"},
              {"claim", claim_to_json(trace.claim)},
              {"strategy", to_string(trace.strategy)},
              {"variant", trace.variant},
              {"decomposition", decomposition},
              {"grounded", grounded},
              {"prompts", prompts},
              {"completions", completions},
              {"parsed", parsed},
              {"clause_value", trace.clause_value ? json(to_string(*trace.clause_value)) : json(nullptr)},
              {"final_label", to_string(trace.final_label)},
              {"consistency", to_string(trace.consistency)},
              {"citations", trace.citations},
              {"timings", json{{"decompose_ms", trace.timings.decompose_ms},
                               {"grounding_ms", trace.timings.grounding_ms},
                               {"reasoning_ms", trace.timings.reasoning_ms},
                               {"total_ms", trace.timings.total_ms}}},
              {"error", trace.error},
              {"diagnostics", trace.diagnostics}};
}

VerdictTrace trace_from_json(const json& j) {
  VerdictTrace trace;
  trace.claim = claim_from_json(j.at("claim"));
  trace.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  trace.variant = j.value("variant", "");

  const json& d = j.at("decomposition");
  for (const json& p : d.value("predicates", json::array()))
    trace.decomposition.predicates.predicates.push_back(predicate_from_json(p));
  trace.decomposition.questions = d.value("questions", std::vector<std::string>{});
  trace.decomposition.diagnostics = d.value("diagnostics", std::vector<std::string>{});

  for (const json& g : j.value("grounded", json::array()))
    trace.grounded.push_back(qa_from_json(g));
  for (const json& p : j.value("prompts", json::array()))
    trace.prompts.push_back({p.value("phase", ""), p.value("text", "")});
  for (const json& c : j.value("completions", json::array())) {
    CompletionResult r;
    r.text = c.value("text", "");
    std::string backend = c.value("backend", "scripted");
    r.backend = backend == "live" ? BackendKind::Live
                : backend == "replay" ? BackendKind::Replay
                                      : BackendKind::Scripted;
    r.latency_ms = c.value("latency_ms", 0L);
    if (c.contains("token_usage") && c["token_usage"].is_object()) {
      TokenUsage u;
      u.prompt_tokens = c["token_usage"].value("prompt_tokens", 0L);
      u.completion_tokens = c["token_usage"].value("completion_tokens", 0L);
      r.token_usage = u;
    }
    trace.completions.push_back(std::move(r));
  }

  const json& parsed = j.at("parsed");
  trace.parsed.label = label_from_string(parsed.value("label", "Unknown"));
  for (const json& jd : parsed.value("judgments", json::array())) {
    PredicateJudgment judgment;
    judgment.predicate = predicate_from_json(jd.at("predicate"));
    judgment.value = truth_from_string(jd.value("value", "Unknown"));
    judgment.reason = jd.value("reason", "");
    trace.parsed.judgments.push_back(std::move(judgment));
  }
  trace.parsed.explanation = parsed.value("explanation", "");
  trace.parsed.diagnostics = parsed.value("diagnostics", std::vector<std::string>{});

  if (j.contains("clause_value") && j["clause_value"].is_string())
    trace.clause_value = truth_from_string(j["clause_value"].get<std::string>());
  trace.final_label = label_from_string(j.value("final_label", "Unknown"));
  trace.consistency = consistency_from_string(j.value("consistency", "NotApplicable"));
  trace.citations = j.value("citations", std::vector<std::string>{});
  if (j.contains("timings")) {
    const json& t = j["timings"];
    trace.timings.decompose_ms = t.value("decompose_ms", 0L);
    trace.timings.grounding_ms = t.value("grounding_ms", 0L);
    trace.timings.reasoning_ms = t.value("reasoning_ms", 0L);
    trace.timings.total_ms = t.value("total_ms", 0L);
  }
  trace.error = j.value("error", "");
  trace.diagnostics = j.value("diagnostics", std::vector<std::string>{});
  return trace;
}

void write_trace_file(const std::filesystem::path& path, const RunManifest& manifest,
                      const std::vector<VerdictTrace>& traces) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw StorageFailure("cannot write trace file: " + path.string());
  out << manifest.to_json().dump() << '\n';
  for (const VerdictTrace& trace : traces) out << trace_to_json(trace).dump() << '\n';
  if (!out) throw StorageFailure("trace write failed: " + path.string());
}

TraceFile read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageFailure("cannot open trace file: " + path.string());
  TraceFile file;
  std::string line;
  int line_no = 0;
  bool have_manifest = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    std::string type = j.value("type", "");
    if (type == "manifest") {
      file.manifest = RunManifest::from_json(j);
      have_manifest = true;
    } else if (type == "trace") {
      try {
        file.traces.push_back(trace_from_json(j));
      } catch (const json::exception& e) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    } else {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": unknown record type '" + type + "'");
    }
  }
  if (!have_manifest)
    throw FormatError(path.string() + ": missing manifest record");
  return file;
}

}  // namespace folk
