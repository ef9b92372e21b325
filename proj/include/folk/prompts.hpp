#ifndef FOLK_PROMPTS_HPP
#define FOLK_PROMPTS_HPP

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "folk/fol.hpp"
#include "folk/grounding.hpp"

namespace folk {

enum class Strategy { Folk, Direct, CoT, SelfAsk };
enum class Phase { Decompose, Reason };

std::string to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);
std::string to_string(Phase p);

enum class Label { Supported, NotSupported, Unknown };

std::string to_string(Label l);
// Accepts SUPPORTED/NOT_SUPPORTED and their SUPPORT(S)/REFUTE(S) synonyms.
Label label_from_string(std::string_view s);

// The "------" line delimiting few-shot examples and the ">>>>>>" response cue.
inline constexpr std::string_view kExampleSeparator = "------";
inline constexpr std::string_view kResponseCue = ">>>>>>";

// One few-shot template asset. The text carries a single {claim} placeholder
// and, for reasoning templates, a single {context} placeholder; substituting
// empty strings reproduces the shipped asset byte-for-byte.
struct PromptTemplate {
  Strategy strategy = Strategy::Folk;
  Phase phase = Phase::Decompose;
  std::string text;
  int shot_count = 0;

  std::string render(std::string_view claim, std::string_view context) const;
};

// Loads the six template assets from a directory. Self-Ask reuses the CoT
// decompose template, so there are six files for seven (strategy, phase)
// pairs.
class TemplateLibrary {
 public:
  static TemplateLibrary load(const std::filesystem::path& assets_dir);

  // Throws UnsupportedPhase for (Direct, Decompose).
  const PromptTemplate& get(Strategy s, Phase p) const;

 private:
  std::map<std::pair<int, int>, PromptTemplate> templates_;
};

// Output of a decomposition call.
struct Decomposition {
  PredicateClause predicates;  // empty for Direct/CoT/Self-Ask
  std::vector<std::string> questions;
  std::vector<std::string> diagnostics;
};

struct PredicateJudgment {
  Predicate predicate;
  Truth value = Truth::Unknown;
  std::string reason;

  bool operator==(const PredicateJudgment& o) const {
    return predicate == o.predicate && value == o.value && reason == o.reason;
  }
};

struct ParsedVerdict {
  Label label = Label::Unknown;
  std::vector<PredicateJudgment> judgments;  // FOLK only
  std::string explanation;
  std::vector<std::string> diagnostics;
};

// Fills the decompose template's claim slot. Self-Ask uses the CoT template.
// Throws UnsupportedPhase for Direct.
std::string build_decompose_prompt(const TemplateLibrary& lib, Strategy strategy,
                                   std::string_view claim);

// Extracts "Followup Question:" lines (and, for FOLK, the "Predicates:"
// block). Parsing stops at the first example separator so runaway few-shot
// continuations are ignored. Throws NoQuestions when no question is found.
Decomposition parse_decomposition(Strategy strategy, std::string_view completion);

// Renders the reasoning prompt: the template's shots verbatim, then the live
// claim's context in the shots' layout. Context shape per strategy:
// Direct none, CoT grounded answers only, Self-Ask question+answer lines,
// FOLK predicate lines then question+answer lines. Throws MissingContext
// when FOLK is given an empty clause.
std::string build_reasoning_prompt(const TemplateLibrary& lib, Strategy strategy,
                                   std::string_view claim, const Decomposition& decomposition,
                                   const std::vector<GroundedQA>& qa);

// Label = first bracketed token; FOLK "<head> is True/False because <reason>"
// lines become judgments (unparseable ones degrade to Unknown with the raw
// line as reason); explanation follows "Explanation:" (FOLK) or "Here are
// the reasons" (others). Unknown label is a value, not an error.
ParsedVerdict parse_verdict(Strategy strategy, std::string_view completion);

// Synthesizes a completion-shaped verdict block; parse_verdict(render_verdict(v))
// reproduces v for True/False judgments.
std::string render_verdict(Strategy strategy, const ParsedVerdict& verdict);

}  // namespace folk

#endif  // FOLK_PROMPTS_HPP
