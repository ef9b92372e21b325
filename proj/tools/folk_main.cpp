// folk: FOL-guided, knowledge-grounded claim verification.
//
// Subcommands: verify, run, score, ablate, record-fixtures.
// Option precedence: command-line flag > config file > environment > default.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "folk/config.hpp"
#include "folk/digest.hpp"
#include "folk/errors.hpp"
#include "folk/evalsuite.hpp"
#include "folk/pipeline.hpp"
#include "folk/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct FlagBag {
  std::map<std::string, std::string> values;
  std::string config_path;

  // Registers a string option that lands in the resolver's CLI layer only
  // when the user actually passed it.
  void add(CLI::App* cmd, const std::string& flag, const std::string& key,
           const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }
};

folk::OptionResolver make_resolver(const FlagBag& bag) {
  std::map<std::string, std::string> file_values;
  if (!bag.config_path.empty()) file_values = folk::parse_config_file(bag.config_path);
  return folk::OptionResolver(bag.values, file_values);
}

fs::path executable_dir() {
  std::error_code ec;
  fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (ec) return fs::current_path();
  return exe.parent_path();
}

fs::path resolve_assets_dir(const folk::OptionResolver& resolver) {
  std::string configured = resolver.get("assets", "FOLK_ASSETS", "");
  if (!configured.empty()) return configured;
  std::vector<fs::path> candidates{fs::current_path() / "assets" / "prompts"};
  fs::path dir = executable_dir();
  for (int i = 0; i < 4; ++i) {
    candidates.push_back(dir / "assets" / "prompts");
    dir = dir.parent_path();
  }
  for (const fs::path& p : candidates)
    if (fs::exists(p / "folk_decompose.txt")) return p;
  throw folk::ConfigError("cannot locate the prompt assets directory; pass --assets");
}

std::vector<std::string> load_scripted_queue(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw folk::StorageFailure("cannot open scripted completions: " + path.string());
  std::vector<std::string> queue;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (folk::trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      if (j.is_string()) queue.push_back(j.get<std::string>());
      else if (j.is_object() && j.contains("text")) queue.push_back(j["text"].get<std::string>());
      else if (j.is_object() && j.contains("completion"))
        queue.push_back(j["completion"].get<std::string>());
      else
        throw folk::FormatError(path.string() + ":" + std::to_string(line_no) +
                                ": expected a string or {text: ...}");
    } catch (const json::exception& e) {
      throw folk::FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return queue;
}

struct BackendSetup {
  std::shared_ptr<folk::CompletionBackend> backend;
  std::string replay_path;  // non-empty in replay mode
  bool live = false;
};

BackendSetup make_backend(const std::string& spec, const folk::OptionResolver& resolver) {
  BackendSetup setup;
  if (spec == "live") {
    folk::LiveConfig config;
    config.url = resolver.get("llm_url", "LLM_API_URL", "");
    config.api_key = resolver.get("llm_key", "LLM_API_KEY", "");
    if (config.url.empty())
      throw folk::ConfigError("live backend requires LLM_API_URL (or llm_url)");
    std::string mapping = resolver.get("adapter_mapping", "", "");
    if (!mapping.empty()) config.mapping = folk::AdapterMapping::load(mapping);
    config.timeout_ms = resolver.get_long("llm_timeout_ms", "", 120000);
    config.max_retries = static_cast<int>(resolver.get_long("llm_max_retries", "", 3));
    setup.backend = std::make_shared<folk::LiveBackend>(
        config, folk::make_http_transport(config.timeout_ms));
    setup.live = true;
    return setup;
  }
  if (spec.rfind("replay:", 0) == 0) {
    setup.replay_path = spec.substr(7);
    setup.backend =
        std::make_shared<folk::ReplayBackend>(folk::ReplayStore::load(setup.replay_path));
    return setup;
  }
  if (spec.rfind("scripted:", 0) == 0) {
    setup.backend =
        std::make_shared<folk::ScriptedBackend>(load_scripted_queue(spec.substr(9)));
    return setup;
  }
  throw folk::ConfigError("backend must be live, replay:PATH or scripted:PATH (got '" + spec +
                          "')");
}

struct GroundingSetup {
  std::unique_ptr<folk::Grounder> grounder;
  std::string corpus_path;
};

GroundingSetup make_grounding(const folk::OptionResolver& resolver) {
  folk::GroundingConfig config;
  GroundingSetup setup;
  config.site_restriction = resolver.get("site_restriction", "", "");
  std::string mode = resolver.get("restriction_mode", "", "prefix");
  if (mode == "prefix") config.restriction_mode = folk::GroundingConfig::RestrictionMode::Prefix;
  else if (mode == "site_operator")
    config.restriction_mode = folk::GroundingConfig::RestrictionMode::SiteOperator;
  else
    throw folk::ConfigError("restriction_mode must be prefix or site_operator");
  config.snippet_max_chars =
      static_cast<int>(resolver.get_long("snippet_max_chars", "", config.snippet_max_chars));
  config.prefer_answer_box = resolver.get_bool("prefer_answer_box", "", true);
  config.requests_per_second = resolver.get_double("requests_per_second", "", 2.0);
  setup.corpus_path = resolver.get("corpus", "", "");
  config.corpus_path = setup.corpus_path;
  config.cache_path = resolver.get("cache", "", "");
  config.search.url = resolver.get("search_url", "", "https://serpapi.com/search");
  config.search.api_key = resolver.get("search_key", "SEARCH_API_KEY", "");

  config.provider_order.clear();
  bool wants_web = false;
  for (const std::string& name :
       folk::split_lines(folk::trim(resolver.get("providers", "", "cache,corpus,web")))) {
    std::stringstream ss(name);
    std::string part;
    while (std::getline(ss, part, ',')) {
      part = folk::trim(part);
      if (part.empty()) continue;
      folk::QaProvider p = folk::qa_provider_from_string(part);
      config.provider_order.push_back(p);
      if (p == folk::QaProvider::WebSearch) wants_web = true;
    }
  }
  // Only web search talks to the network; replay-clean runs never build a
  // transport at all.
  std::shared_ptr<folk::HttpTransport> transport;
  if (wants_web) transport = folk::make_http_transport();
  setup.grounder = std::make_unique<folk::Grounder>(config, transport);
  return setup;
}

folk::PipelineConfig make_pipeline_config(const folk::OptionResolver& resolver, bool live) {
  folk::PipelineConfig config;
  config.model_id = resolver.get("model_id", "LLM_MODEL_ID", folk::kDefaultModelId);
  config.max_tokens = static_cast<int>(resolver.get_long("max_tokens", "", config.max_tokens));
  config.temperature = resolver.get_double("temperature", "", config.temperature);
  config.per_claim_timeout_ms =
      resolver.get_long("per_claim_timeout_ms", "", live ? 120000 : 0);
  return config;
}

folk::RunManifest make_manifest(const std::string& strategy, const folk::PipelineConfig& config,
                                const BackendSetup& backend, const std::string& corpus_path) {
  folk::RunManifest manifest;
  manifest.strategy = strategy;
  manifest.config_digest = config.digest();
  if (!backend.replay_path.empty())
    manifest.fixture_digests["llm_trace"] = folk::sha256_file(backend.replay_path);
  if (!corpus_path.empty()) manifest.fixture_digests["corpus"] = folk::sha256_file(corpus_path);
  return manifest;
}

std::vector<folk::Claim> load_claims(const folk::OptionResolver& resolver,
                                     std::vector<std::string>* diagnostics) {
  std::string dataset = resolver.get("dataset", "", "");
  if (dataset.empty()) throw folk::ConfigError("--dataset is required");
  folk::DatasetFormat format =
      folk::dataset_format_from_string(resolver.get("format", "", "generic"));
  folk::LoadResult loaded = folk::load_dataset(folk::DatasetFile::with_defaults(dataset, format));
  if (diagnostics)
    diagnostics->insert(diagnostics->end(), loaded.diagnostics.begin(), loaded.diagnostics.end());

  long sample_n = resolver.get_long("sample_n", "", 0);
  if (sample_n > 0) {
    std::uint64_t seed = static_cast<std::uint64_t>(resolver.get_long("seed", "", 0));
    return folk::stratified_sample(loaded.claims, static_cast<int>(sample_n), seed);
  }
  return loaded.claims;
}

void print_trace_summary(const folk::VerdictTrace& trace) {
  std::cout << "Claim: " << trace.claim.text << "\n";
  std::cout << "Strategy: " << folk::to_string(trace.strategy);
  if (!trace.variant.empty()) std::cout << " (" << trace.variant << ")";
  std::cout << "\n";

  if (!trace.decomposition.predicates.empty()) {
    std::cout << "\nPredicates:\n";
    for (const folk::Predicate& p : trace.decomposition.predicates.predicates)
      std::cout << "  " << folk::render_predicate(p) << "\n";
  }
  if (!trace.grounded.empty()) {
    std::cout << "\nFollow-up QA:\n";
    for (const folk::GroundedQA& qa : trace.grounded) {
      std::cout << "  Q: " << qa.question << "\n";
      std::cout << "  A: " << qa.answer;
      if (!qa.source_url.empty()) std::cout << "  [" << qa.source_url << "]";
      std::cout << "\n";
    }
  }
  if (!trace.parsed.judgments.empty()) {
    std::cout << "\nPrediction:\n";
    for (const folk::PredicateJudgment& j : trace.parsed.judgments) {
      std::cout << "  " << j.predicate.head() << " is " << folk::to_string(j.value);
      if (!j.reason.empty()) std::cout << " because " << j.reason;
      std::cout << "\n";
    }
    if (trace.clause_value)
      std::cout << "  clause value: " << folk::to_string(*trace.clause_value) << " ("
                << folk::to_string(trace.consistency) << ")\n";
  }
  std::cout << "\nLabel: " << folk::to_string(trace.final_label) << "\n";
  if (!trace.parsed.explanation.empty())
    std::cout << "\nExplanation:\n" << trace.parsed.explanation << "\n";
  if (!trace.citations.empty()) {
    std::cout << "\nSources:\n";
    for (std::size_t i = 0; i < trace.citations.size(); ++i)
      std::cout << "  " << (i + 1) << ". " << trace.citations[i] << "\n";
  }
  if (!trace.error.empty()) std::cout << "\nError: " << trace.error << "\n";
}

int cmd_verify(const FlagBag& bag, const std::string& claim_text) {
  folk::OptionResolver resolver = make_resolver(bag);
  std::string strategy_name = resolver.get("strategy", "", "");
  if (strategy_name.empty()) throw folk::ConfigError("--strategy is required");
  folk::Strategy strategy = folk::strategy_from_string(strategy_name);
  if (folk::trim(claim_text).empty()) throw folk::ConfigError("claim text must be non-empty");

  std::string backend_spec = resolver.get("backend", "", "");
  if (backend_spec.empty()) throw folk::ConfigError("--backend is required");
  BackendSetup backend = make_backend(backend_spec, resolver);
  folk::Gateway gateway(backend.backend);
  GroundingSetup grounding = make_grounding(resolver);
  folk::TemplateLibrary templates = folk::TemplateLibrary::load(resolve_assets_dir(resolver));
  folk::PipelineConfig config = make_pipeline_config(resolver, backend.live);

  folk::Claim claim;
  claim.id = resolver.get("claim_id", "", "cli");
  claim.text = claim_text;

  folk::PipelineServices services{&gateway, grounding.grounder.get(), &templates};
  folk::VerdictTrace trace = folk::verify_claim(services, claim, strategy, config);
  print_trace_summary(trace);

  std::string out = resolver.get("out", "", "");
  if (!out.empty()) {
    folk::write_trace_file(out,
                           make_manifest(folk::to_string(strategy), config, backend,
                                         grounding.corpus_path),
                           {trace});
    std::cout << "\ntrace written to " << out << "\n";
  }
  return trace.final_label == folk::Label::Unknown ? 2 : 0;
}

int cmd_run(const FlagBag& bag) {
  folk::OptionResolver resolver = make_resolver(bag);
  std::string strategy_name = resolver.get("strategy", "", "");
  if (strategy_name.empty()) throw folk::ConfigError("--strategy is required");
  folk::Strategy strategy = folk::strategy_from_string(strategy_name);
  std::string out = resolver.get("out", "", "");
  if (out.empty()) throw folk::ConfigError("--out is required");
  std::string backend_spec = resolver.get("backend", "", "");
  if (backend_spec.empty()) throw folk::ConfigError("--backend is required");

  std::vector<std::string> diagnostics;
  std::vector<folk::Claim> claims = load_claims(resolver, &diagnostics);
  for (const std::string& d : diagnostics) std::cerr << "note: " << d << "\n";

  BackendSetup backend = make_backend(backend_spec, resolver);
  folk::Gateway gateway(backend.backend);
  GroundingSetup grounding = make_grounding(resolver);
  folk::TemplateLibrary templates = folk::TemplateLibrary::load(resolve_assets_dir(resolver));
  folk::PipelineConfig config = make_pipeline_config(resolver, backend.live);
  int parallelism = static_cast<int>(resolver.get_long("parallelism", "", 1));

  folk::PipelineServices services{&gateway, grounding.grounder.get(), &templates};
  std::vector<folk::VerdictTrace> traces =
      folk::run_batch(services, claims, strategy, config, parallelism);
  folk::write_trace_file(out, make_manifest(folk::to_string(strategy), config, backend,
                                            grounding.corpus_path),
                         traces);

  std::map<std::string, int> histogram;
  int errors = 0;
  for (const folk::VerdictTrace& t : traces) {
    histogram[folk::to_string(t.final_label)]++;
    if (!t.error.empty()) errors++;
  }
  std::cout << traces.size() << " claims -> " << out << "\n";
  for (const auto& [label, count] : histogram) std::cout << "  " << label << ": " << count << "\n";
  if (errors) std::cout << "  (errors recorded in " << errors << " traces)\n";
  return 0;
}

int cmd_score(const FlagBag& bag) {
  folk::OptionResolver resolver = make_resolver(bag);
  std::string traces_path = resolver.get("traces", "", "");
  std::string predictions_path = resolver.get("predictions", "", "");
  if (traces_path.empty() == predictions_path.empty())
    throw folk::ConfigError("pass exactly one of --traces or --predictions");

  folk::EvalReport report;
  std::vector<std::string> diagnostics;
  if (!traces_path.empty()) {
    report = folk::score_traces(folk::read_trace_file(traces_path));
  } else {
    std::vector<folk::Claim> gold = load_claims(resolver, &diagnostics);
    report = folk::score_predictions(folk::load_predictions(predictions_path), gold, &diagnostics);
  }

  std::string sheet_path = resolver.get("ranking_sheet", "", "");
  if (!sheet_path.empty()) {
    folk::AlphaMetric metric =
        folk::alpha_metric_from_string(resolver.get("alpha_metric", "", "ordinal"));
    folk::attach_rankings(report, folk::load_ranking_csv(sheet_path), metric);
  }

  for (const std::string& d : diagnostics) std::cerr << "note: " << d << "\n";
  std::cout << report.render_table();
  for (const auto& [criterion, mar] : report.mar) {
    std::cout << "\nMAR (" << criterion << "):\n";
    for (const auto& [system, value] : mar.average)
      std::cout << "  " << system << ": " << value << "\n";
    auto alpha_it = report.alpha.find(criterion);
    if (alpha_it != report.alpha.end())
      std::cout << "  Krippendorff alpha: " << alpha_it->second.value << "\n";
  }
  std::string out = resolver.get("out", "", "");
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw folk::StorageFailure("cannot write report: " + out);
    f << report.to_json().dump(2) << "\n";
    std::cout << "report written to " << out << "\n";
  }
  return 0;
}

int cmd_ablate(const FlagBag& bag) {
  folk::OptionResolver resolver = make_resolver(bag);
  std::string variant_name = resolver.get("variant", "", "");
  if (variant_name.empty()) throw folk::ConfigError("--variant is required");
  folk::AblationVariant variant = folk::ablation_variant_from_string(variant_name);
  std::string folk_traces = resolver.get("folk_traces", "", "");
  if (folk_traces.empty()) throw folk::ConfigError("--folk-traces is required");
  std::string out = resolver.get("out", "", "");
  if (out.empty()) throw folk::ConfigError("--out is required");
  std::string backend_spec = resolver.get("backend", "", "");
  if (backend_spec.empty()) throw folk::ConfigError("--backend is required");

  folk::TraceFile prior = folk::read_trace_file(folk_traces);
  BackendSetup backend = make_backend(backend_spec, resolver);
  folk::Gateway gateway(backend.backend);
  folk::TemplateLibrary templates = folk::TemplateLibrary::load(resolve_assets_dir(resolver));
  folk::PipelineConfig config = make_pipeline_config(resolver, backend.live);

  folk::PipelineServices services{&gateway, nullptr, &templates};
  std::vector<folk::VerdictTrace> traces =
      folk::cross_format_run(services, prior.traces, variant, config);
  folk::write_trace_file(out, make_manifest(folk::to_string(variant), config, backend, ""),
                         traces);
  std::cout << traces.size() << " claims -> " << out << "\n";
  return 0;
}

int cmd_record_fixtures(const FlagBag& bag, const std::string& claim_text) {
  folk::OptionResolver resolver = make_resolver(bag);
  std::string record_path = resolver.get("record", "", "");
  if (record_path.empty()) throw folk::ConfigError("--record is required");
  std::string strategy_name = resolver.get("strategy", "", "");
  if (strategy_name.empty()) throw folk::ConfigError("--strategy is required");
  folk::Strategy strategy = folk::strategy_from_string(strategy_name);
  std::string backend_spec = resolver.get("backend", "", "");
  if (backend_spec.empty()) throw folk::ConfigError("--backend is required");
  if (backend_spec.rfind("replay:", 0) == 0)
    throw folk::ConfigError("record-fixtures needs a live or scripted backend");

  std::vector<folk::Claim> claims;
  if (!claim_text.empty()) {
    folk::Claim c;
    c.id = "fixture";
    c.text = claim_text;
    claims.push_back(std::move(c));
  } else {
    claims = load_claims(resolver, nullptr);
  }

  BackendSetup backend = make_backend(backend_spec, resolver);
  folk::Gateway gateway(backend.backend);
  gateway.record_session(record_path);
  GroundingSetup grounding = make_grounding(resolver);
  folk::TemplateLibrary templates = folk::TemplateLibrary::load(resolve_assets_dir(resolver));
  folk::PipelineConfig config = make_pipeline_config(resolver, backend.live);

  folk::PipelineServices services{&gateway, grounding.grounder.get(), &templates};
  std::vector<folk::VerdictTrace> traces =
      folk::run_batch(services, claims, strategy, config, 1);
  fs::path recorded = gateway.finalize_session();

  int errors = 0;
  for (const folk::VerdictTrace& t : traces)
    if (!t.error.empty()) ++errors;
  std::cout << gateway.call_count() << " completions recorded to " << recorded.string() << "\n";
  if (errors) {
    std::cerr << errors << " claims recorded errors; fixture set may be incomplete\n";
    return 1;
  }
  std::string out = resolver.get("out", "", "");
  if (!out.empty())
    folk::write_trace_file(out, make_manifest(folk::to_string(strategy), config, backend,
                                              grounding.corpus_path),
                           traces);
  return 0;
}

void add_common_flags(CLI::App* cmd, FlagBag& bag) {
  cmd->add_option("--config", bag.config_path, "key = value config file");
  bag.add(cmd, "--strategy", "strategy", "direct|cot|selfask|folk");
  bag.add(cmd, "--backend", "backend", "live | replay:PATH | scripted:PATH");
  bag.add(cmd, "--model", "model_id", "completion model id");
  bag.add(cmd, "--max-tokens", "max_tokens", "completion token budget");
  bag.add(cmd, "--temperature", "temperature", "sampling temperature");
  bag.add(cmd, "--assets", "assets", "prompt template directory");
  bag.add(cmd, "--corpus", "corpus", "offline grounding corpus (ndjson)");
  bag.add(cmd, "--cache", "cache", "grounding cache file");
  bag.add(cmd, "--providers", "providers", "grounding provider order (csv: cache,corpus,web)");
  bag.add(cmd, "--site-restriction", "site_restriction", "restrict search to a domain");
  bag.add(cmd, "--restriction-mode", "restriction_mode", "prefix | site_operator");
  bag.add(cmd, "--search-url", "search_url", "search API endpoint");
  bag.add(cmd, "--parallelism", "parallelism", "worker pool size");
  bag.add(cmd, "--timeout-ms", "per_claim_timeout_ms", "per-claim timeout (live runs)");
  bag.add(cmd, "--out", "out", "output path");
  bag.add(cmd, "--dataset", "dataset", "dataset file");
  bag.add(cmd, "--format", "format", "hover|feverous|scifact|generic");
  bag.add(cmd, "--sample-n", "sample_n", "stratified sample size");
  bag.add(cmd, "--seed", "seed", "sampling seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FOL-guided knowledge-grounded claim verification"};
  app.require_subcommand(1);

  FlagBag verify_bag, run_bag, score_bag, ablate_bag, record_bag;
  std::string verify_claim_text, record_claim_text;

  CLI::App* verify = app.add_subcommand("verify", "verify a single claim");
  verify->add_option("claim", verify_claim_text, "claim text")->required();
  add_common_flags(verify, verify_bag);

  CLI::App* run = app.add_subcommand("run", "run a batch over a dataset");
  add_common_flags(run, run_bag);

  CLI::App* score = app.add_subcommand("score", "score traces or predictions");
  add_common_flags(score, score_bag);
  score_bag.add(score, "--traces", "traces", "trace file from run");
  score_bag.add(score, "--predictions", "predictions", "external predictions (jsonl id/label)");
  score_bag.add(score, "--ranking-sheet", "ranking_sheet", "annotator rankings csv");
  score_bag.add(score, "--alpha-metric", "alpha_metric", "ordinal | interval");

  CLI::App* ablate = app.add_subcommand("ablate", "re-reason over prior FOLK artifacts");
  add_common_flags(ablate, ablate_bag);
  ablate_bag.add(ablate, "--variant", "variant",
                 "cot-with-folk-questions | selfask-with-folk-questions | folk-self-answers");
  ablate_bag.add(ablate, "--folk-traces", "folk_traces", "trace file from a FOLK run");

  CLI::App* record = app.add_subcommand("record-fixtures", "record completions for replay");
  record->add_option("claim", record_claim_text, "single claim text (alternative to --dataset)");
  add_common_flags(record, record_bag);
  record_bag.add(record, "--record", "record", "output replay store path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand(verify)) return cmd_verify(verify_bag, verify_claim_text);
    if (app.got_subcommand(run)) return cmd_run(run_bag);
    if (app.got_subcommand(score)) return cmd_score(score_bag);
    if (app.got_subcommand(ablate)) return cmd_ablate(ablate_bag);
    if (app.got_subcommand(record)) return cmd_record_fixtures(record_bag, record_claim_text);
  } catch (const folk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
