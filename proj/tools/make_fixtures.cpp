// Regenerates the bundled demo fixtures: a replay store and offline corpus
// for the multi-hop silver-medal example, produced by running the real FOLK
// pipeline against a scripted backend so the replay tags always match the
// shipped prompt templates.
//
// Usage: folk-make-fixtures <assets/prompts dir> <output dir>

#include <fstream>
#include <iostream>

#include "json.hpp"

#include "folk/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kClaim =
    "Lubabalo Kondlo won a silver medal in the 2012 SportAccord World Mind Games inaugurated in "
    "July 2011 in Beijing.";

const char* kDecomposeCompletion =
    "Predicates:\n"
    "Won(Lubabalo Kondlo, a silver medal) ::: Verify Lubabalo Kondlo won a silver medal\n"
    "Inaugurated(the 2012 SportAccord World Mind Games, July 2011, Beijing) ::: Verify the 2012 "
    "SportAccord World Mind Games was inaugurated in July 2011 in Beijing.\n"
    "\n"
    "Followup Question: What did Lubabalo Kondlo win in the 2012 SportAccord World Mind Games?\n"
    "Followup Question: When and where was the 2012 SportAccord World Mind Games inaugurated?\n";

const char* kReasonCompletion =
    "Prediction:\n"
    "Won(Lubabalo Kondlo, a silver medal) is True because In 2012 he won the silver medal at the "
    "SportAccord World Mind Games in Beijing, China.\n"
    "Inaugurated(the 2012 SportAccord World Mind Games, July 2011, Beijing) is False because The "
    "International Mind Sports Association (IMSA) inaugurated the SportAccord World Mind Games "
    "December 2011 in Beijing.\n"
    "Won(Lubabalo Kondlo, a silver medal) && Inaugurated(the 2012 SportAccord World Mind Games, "
    "July 2011, Beijing) is False.\n"
    "The claim is [NOT_SUPPORTED].\n"
    "\n"
    "Explanation:\n"
    "Lubabalo Kondlo won a silver medal in the 2012 SportAccord World Mind Games. However, the "
    "event was inaugurated in December 2011, not July 2011, in Beijing.\n";

struct CorpusEntry {
  const char* question;
  const char* answer;
  const char* url;
};

const CorpusEntry kCorpus[] = {
    {"What did Lubabalo Kondlo win in the 2012 SportAccord World Mind Games?",
     "In 2012 he won the silver medal, behind Ion Dosca, at the SportAccord World Mind Games in "
     "Beijing, China.",
     "https://en.wikipedia.org/wiki/Lubabalo_Kondlo"},
    {"When and where was the 2012 SportAccord World Mind Games inaugurated?",
     "The International Mind Sports Association (IMSA) inaugurated the SportAccord World Mind "
     "Games December 2011 in Beijing, China.",
     "https://en.wikipedia.org/wiki/SportAccord_World_Mind_Games"},
};

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: folk-make-fixtures <assets/prompts dir> <output dir>\n";
    return 1;
  }
  fs::path assets = argv[1];
  fs::path out_dir = argv[2];
  fs::create_directories(out_dir);

  try {
    fs::path corpus_path = out_dir / "table1_corpus.ndjson";
    {
      std::ofstream corpus(corpus_path, std::ios::trunc);
      for (const CorpusEntry& e : kCorpus) {
        corpus << json{{"question", e.question}, {"answer", e.answer}, {"url", e.url}}.dump()
               << "\n";
      }
    }

    auto backend = std::make_shared<folk::ScriptedBackend>(
        std::vector<std::string>{kDecomposeCompletion, kReasonCompletion});
    folk::Gateway gateway(backend);
    fs::path store_path = out_dir / "table1.ndjson";
    gateway.record_session(store_path);

    folk::GroundingConfig gconfig;
    gconfig.corpus_path = corpus_path;
    gconfig.provider_order = {folk::QaProvider::OfflineCorpus};
    folk::Grounder grounder(gconfig);

    folk::TemplateLibrary templates = folk::TemplateLibrary::load(assets);
    folk::PipelineServices services{&gateway, &grounder, &templates};

    folk::Claim claim;
    claim.id = "hover-table1";
    claim.text = kClaim;
    claim.gold_label = folk::Label::NotSupported;
    claim.dataset = folk::DatasetTag::HoVer;
    claim.challenge = folk::Challenge::MultiHop;

    folk::VerdictTrace trace =
        folk::verify_claim(services, claim, folk::Strategy::Folk, folk::PipelineConfig{});
    gateway.finalize_session();

    if (!trace.error.empty()) {
      std::cerr << "pipeline error while recording: " << trace.error << "\n";
      return 1;
    }
    if (trace.final_label != folk::Label::NotSupported ||
        trace.clause_value != folk::Truth::False ||
        trace.consistency != folk::Consistency::Consistent || trace.citations.size() != 2) {
      std::cerr << "recorded trace does not match the expected worked example\n";
      return 1;
    }

    std::cout << "wrote " << store_path.string() << " and " << corpus_path.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
