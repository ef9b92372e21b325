#include "folk/prompts.hpp"

#include <fstream>
#include <sstream>

#include "folk/errors.hpp"
#include "folk/text.hpp"

namespace folk {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Folk: return "folk";
    case Strategy::Direct: return "direct";
    case Strategy::CoT: return "cot";
    case Strategy::SelfAsk: return "selfask";
  }
  return "folk";
}

Strategy strategy_from_string(std::string_view s) {
  std::string v = to_lower(s);
  if (v == "folk") return Strategy::Folk;
  if (v == "direct") return Strategy::Direct;
  if (v == "cot") return Strategy::CoT;
  if (v == "selfask" || v == "self-ask" || v == "self_ask") return Strategy::SelfAsk;
  throw ConfigError("unknown strategy: " + std::string(s));
}

std::string to_string(Phase p) { return p == Phase::Decompose ? "decompose" : "reason"; }

std::string to_string(Label l) {
  switch (l) {
    case Label::Supported: return "SUPPORTED";
    case Label::NotSupported: return "NOT_SUPPORTED";
    case Label::Unknown: return "Unknown";
  }
  return "Unknown";
}

Label label_from_string(std::string_view s) {
  std::string v = to_lower(trim(s));
  if (v == "supported" || v == "supports" || v == "support") return Label::Supported;
  if (v == "not_supported" || v == "refutes" || v == "refute" || v == "refuted" ||
      v == "not supported")
    return Label::NotSupported;
  if (v == "unknown") return Label::Unknown;
  throw ConfigError("unknown label: " + std::string(s));
}

namespace {

constexpr std::string_view kClaimSlot = "{claim}";
constexpr std::string_view kContextSlot = "{context}";
constexpr std::string_view kSupportedToken = "[SUPPORTED]";
constexpr std::string_view kNotSupportedToken = "[NOT_SUPPORTED]";
constexpr std::string_view kQuestionPrefix = "Followup Question:";
constexpr std::string_view kQuestionPrefixAlt = "Follow-up Question:";

void replace_once(std::string& text, std::string_view slot, std::string_view value) {
  std::size_t pos = text.find(slot);
  if (pos == std::string::npos) return;
  text.replace(pos, slot.size(), value);
}

std::string template_filename(Strategy s, Phase p) {
  if (p == Phase::Decompose) {
    // Self-Ask shares the CoT decompose template.
    return s == Strategy::Folk ? "folk_decompose.txt" : "cot_decompose.txt";
  }
  switch (s) {
    case Strategy::Folk: return "folk_reason.txt";
    case Strategy::Direct: return "direct_reason.txt";
    case Strategy::CoT: return "cot_reason.txt";
    case Strategy::SelfAsk: return "selfask_reason.txt";
  }
  return "folk_reason.txt";
}

int count_separators(const std::string& text) {
  int shots = 0;
  for (const std::string& line : split_lines(text))
    if (line == kExampleSeparator) ++shots;
  return shots;
}

std::size_t count_occurrences(const std::string& text, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

std::string PromptTemplate::render(std::string_view claim, std::string_view context) const {
  std::string out = text;
  replace_once(out, kClaimSlot, claim);
  replace_once(out, kContextSlot, context);
  return out;
}

TemplateLibrary TemplateLibrary::load(const std::filesystem::path& assets_dir) {
  TemplateLibrary lib;
  const std::pair<Strategy, Phase> slots[] = {
      {Strategy::CoT, Phase::Decompose},    {Strategy::Folk, Phase::Decompose},
      {Strategy::SelfAsk, Phase::Decompose},
      {Strategy::Direct, Phase::Reason},    {Strategy::CoT, Phase::Reason},
      {Strategy::SelfAsk, Phase::Reason},   {Strategy::Folk, Phase::Reason},
  };
  for (auto [strategy, phase] : slots) {
    std::filesystem::path file = assets_dir / template_filename(strategy, phase);
    std::ifstream in(file, std::ios::binary);
    if (!in) throw StorageFailure("missing prompt template: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    PromptTemplate t;
    t.strategy = strategy;
    t.phase = phase;
    t.text = buf.str();
    t.shot_count = count_separators(t.text);

    if (count_occurrences(t.text, kClaimSlot) != 1)
      throw ConfigError(file.string() + ": expected exactly one {claim} placeholder");
    std::size_t contexts = count_occurrences(t.text, kContextSlot);
    if (phase == Phase::Reason ? contexts != 1 : contexts != 0)
      throw ConfigError(file.string() + ": bad {context} placeholder count");
    if (t.shot_count < 4)
      throw ConfigError(file.string() + ": expected at least 4 few-shot examples");
    std::string rendered = t.render("", "");
    std::string tail = std::string(kResponseCue) + "\n";
    if (rendered.size() < tail.size() ||
        rendered.compare(rendered.size() - tail.size(), tail.size(), tail) != 0)
      throw ConfigError(file.string() + ": template must end with the response cue");

    lib.templates_[{static_cast<int>(strategy), static_cast<int>(phase)}] = std::move(t);
  }
  return lib;
}

const PromptTemplate& TemplateLibrary::get(Strategy s, Phase p) const {
  if (s == Strategy::Direct && p == Phase::Decompose)
    throw UnsupportedPhase("the direct strategy has no decomposition phase");
  auto it = templates_.find({static_cast<int>(s), static_cast<int>(p)});
  if (it == templates_.end()) throw ConfigError("template library not loaded");
  return it->second;
}

std::string build_decompose_prompt(const TemplateLibrary& lib, Strategy strategy,
                                   std::string_view claim) {
  const PromptTemplate& t = lib.get(strategy, Phase::Decompose);
  return t.render(claim, "");
}

Decomposition parse_decomposition(Strategy strategy, std::string_view completion) {
  Decomposition out;
  std::vector<std::string> lines = split_lines(normalize_completion(completion));

  // Ignore hallucinated continuation examples past the first separator.
  std::size_t end = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]) == kExampleSeparator) {
      end = i;
      break;
    }
  }

  std::size_t predicates_header = end;  // index of "Predicates:" line, if any
  std::size_t first_question = end;
  for (std::size_t i = 0; i < end; ++i) {
    std::string t = trim(lines[i]);
    if (predicates_header == end && t == "Predicates:") predicates_header = i;
    bool is_question = t.starts_with(kQuestionPrefix) || t.starts_with(kQuestionPrefixAlt);
    if (is_question) {
      if (first_question == end) first_question = i;
      std::size_t colon = t.find(':');
      std::string q = trim(t.substr(colon + 1));
      if (q.empty())
        out.diagnostics.push_back("empty followup question skipped");
      else
        out.questions.push_back(std::move(q));
    }
  }

  if (strategy == Strategy::Folk) {
    if (predicates_header == end) {
      out.diagnostics.push_back("no Predicates: block in decomposition");
    } else {
      std::size_t block_end = std::min(first_question > predicates_header ? first_question : end, end);
      std::vector<std::string> block(lines.begin() + predicates_header + 1,
                                     lines.begin() + block_end);
      ClauseParse parsed = parse_clause(join(block, "\n"));
      out.predicates = std::move(parsed.clause);
      for (const ParseDiagnostic& d : parsed.diagnostics)
        out.diagnostics.push_back("predicates block line " + std::to_string(d.line) + ": " +
                                  d.reason);
    }
    if (!out.predicates.empty() && !out.questions.empty() &&
        out.predicates.size() != out.questions.size()) {
      out.diagnostics.push_back(
          "predicate/question count mismatch: " + std::to_string(out.predicates.size()) + " vs " +
          std::to_string(out.questions.size()));
    }
  }

  if (out.questions.empty()) throw NoQuestions("no followup questions in completion");
  return out;
}

namespace {

std::string qa_line(const GroundedQA& qa) { return qa.question + " " + qa.answer; }

std::string folk_context(const Decomposition& d, const std::vector<GroundedQA>& qa) {
  std::vector<std::string> pred_lines;
  pred_lines.reserve(d.predicates.size());
  for (const Predicate& p : d.predicates.predicates) pred_lines.push_back(render_predicate(p));
  std::string out = "\n" + join(pred_lines, "\n");
  if (!qa.empty()) {
    std::vector<std::string> qa_lines;
    qa_lines.reserve(qa.size());
    for (const GroundedQA& g : qa) qa_lines.push_back(qa_line(g));
    out += "\n\n" + join(qa_lines, "\n");
  }
  return out;
}

}  // namespace

std::string build_reasoning_prompt(const TemplateLibrary& lib, Strategy strategy,
                                   std::string_view claim, const Decomposition& decomposition,
                                   const std::vector<GroundedQA>& qa) {
  const PromptTemplate& t = lib.get(strategy, Phase::Reason);
  std::string claim_text(claim);
  std::string context;
  switch (strategy) {
    case Strategy::Direct:
      break;  // claim only
    case Strategy::CoT: {
      // Knowledge-grounded answers only, one per line, matching the shots.
      claim_text += " ?";
      std::vector<std::string> answers;
      answers.reserve(qa.size());
      for (const GroundedQA& g : qa) answers.push_back(g.answer);
      if (!answers.empty()) context = join(answers, "\n") + "\n";
      break;
    }
    case Strategy::SelfAsk: {
      claim_text += " ?";
      std::vector<std::string> qa_lines;
      qa_lines.reserve(qa.size());
      for (const GroundedQA& g : qa) qa_lines.push_back(qa_line(g));
      if (!qa_lines.empty()) context = "\n" + join(qa_lines, "\n");
      break;
    }
    case Strategy::Folk: {
      if (decomposition.predicates.empty())
        throw MissingContext("FOLK reasoning requires a non-empty predicate clause");
      claim_text += "?";
      context = folk_context(decomposition, qa);
      break;
    }
  }
  return t.render(claim_text, context);
}

namespace {

// Parses "<head> is True|False because <reason>" lines. Returns false when
// the line is not judgment-shaped at all; a head followed by an
// unrecognizable tail degrades to Unknown with the raw line as reason.
bool parse_judgment_line(const std::string& line, std::vector<PredicateJudgment>& out,
                         std::vector<std::string>& diagnostics) {
  std::size_t open = line.find('(');
  if (open == std::string::npos) return false;
  int depth = 0;
  std::size_t close = std::string::npos;
  for (std::size_t i = open; i < line.size(); ++i) {
    if (line[i] == '(') ++depth;
    else if (line[i] == ')' && --depth == 0) {
      close = i;
      break;
    }
  }
  if (close == std::string::npos) return false;

  std::string tail = trim(line.substr(close + 1));
  if (tail.starts_with("&&")) return false;  // whole-clause line, not a judgment
  if (!tail.starts_with("is ")) return false;

  Predicate pred;
  try {
    pred = parse_predicate(line.substr(0, close + 1));
  } catch (const MalformedPredicate&) {
    return false;
  }

  std::string rest = trim(tail.substr(3));
  Truth value = Truth::Unknown;
  std::string reason;
  bool recognized = false;
  for (auto [token, truth] : {std::pair{"True", Truth::True}, std::pair{"False", Truth::False}}) {
    std::string_view tok(token);
    if (rest.starts_with(tok)) {
      std::string after = trim(rest.substr(tok.size()));
      if (after.empty() || after == ".") {
        value = truth;
        recognized = true;
      } else if (after.starts_with("because")) {
        value = truth;
        reason = trim(after.substr(7));
        recognized = true;
      }
      break;
    }
  }
  if (!recognized) {
    diagnostics.push_back("unparseable judgment degraded to Unknown: " + line);
    out.push_back({std::move(pred), Truth::Unknown, line});
    return true;
  }
  out.push_back({std::move(pred), value, std::move(reason)});
  return true;
}

}  // namespace

ParsedVerdict parse_verdict(Strategy strategy, std::string_view completion) {
  ParsedVerdict out;
  std::string text = normalize_completion(completion);

  // Ignore runaway continuation examples.
  std::vector<std::string> lines = split_lines(text);
  std::size_t end = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]) == kExampleSeparator) {
      end = i;
      break;
    }
  }
  lines.resize(end);
  text = join(lines, "\n");

  std::size_t pos_supported = text.find(kSupportedToken);
  std::size_t pos_not = text.find(kNotSupportedToken);
  if (pos_supported == std::string::npos && pos_not == std::string::npos) {
    out.label = Label::Unknown;
  } else if (pos_not == std::string::npos || pos_supported < pos_not) {
    out.label = Label::Supported;
  } else {
    out.label = Label::NotSupported;
  }
  bool both = pos_supported != std::string::npos && pos_not != std::string::npos;
  if (both) out.diagnostics.push_back("multiple label tokens; first occurrence wins");

  if (strategy == Strategy::Folk) {
    std::size_t explanation_at = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (trim(lines[i]) == "Explanation:") {
        explanation_at = i;
        break;
      }
    }
    for (std::size_t i = 0; i < explanation_at; ++i) {
      std::vector<PredicateJudgment> found;
      if (!parse_judgment_line(lines[i], found, out.diagnostics)) continue;
      for (PredicateJudgment& j : found) {
        bool duplicate = false;
        for (const PredicateJudgment& seen : out.judgments) {
          if (seen.predicate.identity() == j.predicate.identity()) {
            duplicate = true;
            if (seen.value != j.value)
              out.diagnostics.push_back("conflicting repeat judgment ignored: " + lines[i]);
            break;
          }
        }
        if (!duplicate) out.judgments.push_back(std::move(j));
      }
    }
    if (explanation_at < lines.size()) {
      std::vector<std::string> rest(lines.begin() + explanation_at + 1, lines.end());
      out.explanation = trim(join(rest, "\n"));
    }
  } else {
    std::size_t marker = text.find("Here are the reasons");
    if (marker != std::string::npos) {
      std::size_t p = marker + std::string_view("Here are the reasons").size();
      if (p < text.size() && (text[p] == ':' || text[p] == ',')) ++p;
      out.explanation = trim(text.substr(p));
    }
  }
  return out;
}

std::string render_verdict(Strategy strategy, const ParsedVerdict& verdict) {
  std::ostringstream out;
  if (strategy == Strategy::Folk) {
    out << "Prediction:\n";
    std::vector<std::string> heads;
    Truth folded = Truth::True;
    for (const PredicateJudgment& j : verdict.judgments) {
      out << j.predicate.head() << " is " << to_string(j.value);
      if (!j.reason.empty()) out << " because " << j.reason;
      out << "\n";
      heads.push_back(j.predicate.head());
      if (j.value == Truth::False) folded = Truth::False;
      else if (j.value == Truth::Unknown && folded != Truth::False) folded = Truth::Unknown;
    }
    // the conjunction summary line only makes sense for two or more predicates
    if (heads.size() >= 2) out << join(heads, " && ") << " is " << to_string(folded) << ".\n";
    if (verdict.label != Label::Unknown)
      out << "The claim is [" << to_string(verdict.label) << "].\n";
    out << "\nExplanation:\n" << verdict.explanation << "\n";
  } else {
    if (verdict.label != Label::Unknown)
      out << "This claim is: [" << to_string(verdict.label) << "]\n";
    out << "Here are the reasons: " << verdict.explanation << "\n";
  }
  return out.str();
}

}  // namespace folk
