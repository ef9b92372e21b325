#ifndef FOLK_EVALSUITE_HPP
#define FOLK_EVALSUITE_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "folk/pipeline.hpp"

namespace folk {

enum class DatasetFormat { HoVerJson, FeverousJson, SciFactJson, GenericJsonl };

DatasetFormat dataset_format_from_string(std::string_view s);
std::string to_string(DatasetFormat f);

// Which source keys hold the claim text / label / challenge; defaults differ
// per format and every field can be overridden.
struct FieldMapping {
  std::string id_field = "id";
  std::string claim_field = "claim";
  std::string label_field = "label";
  std::map<std::string, std::string> label_map;  // source label -> SUPPORTED/NOT_SUPPORTED
  std::string hops_field;                        // HoVER: numeric hop count
  std::string challenge_field;                   // FEVEROUS: challenge string
  std::map<std::string, std::string> challenge_map;
  std::string evidence_field;  // SciFact: per-document evidence labels
  Challenge default_challenge = Challenge::None;

  static FieldMapping defaults(DatasetFormat format);
};

struct DatasetFile {
  std::filesystem::path path;
  DatasetFormat format = DatasetFormat::GenericJsonl;
  FieldMapping mapping;  // defaulted from format when not customized

  static DatasetFile with_defaults(std::filesystem::path path, DatasetFormat format);
};

struct LoadResult {
  std::vector<Claim> claims;
  std::vector<std::string> diagnostics;  // skipped records, unknown tags
};

// Accepts JSONL or a single top-level JSON array. Throws FormatError with
// the offending line number.
LoadResult load_dataset(const DatasetFile& file);

// Deterministic stratified sample: per label class, ids are ordered by a
// seeded hash key and the first quota taken; the larger class receives the
// ceiling half of n. Output preserves the input order of the chosen claims.
// Throws InsufficientClass when a class cannot fill its quota.
std::vector<Claim> stratified_sample(const std::vector<Claim>& claims, int n, std::uint64_t seed);

struct ClassCounts {
  long tp = 0, fp = 0, fn = 0;
  double precision() const { return tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn); }
  double f1() const {
    double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

struct ConfusionCounts {
  ClassCounts supported;
  ClassCounts not_supported;
  long unknown_predictions = 0;
  long total = 0;
};

ConfusionCounts confusion_counts(const std::vector<Label>& pred, const std::vector<Label>& gold);

// Unweighted mean of per-class F1 over SUPPORTED/NOT_SUPPORTED. Unknown
// predictions count against the gold class and never form a class of their
// own; a class absent from gold joins the mean (with F1 0) only when it was
// predicted at least once. Throws LengthMismatch.
double macro_f1(const std::vector<Label>& pred, const std::vector<Label>& gold);

// Annotator rankings of system explanations for one criterion. Every
// (annotator, item, system) cell must be filled; ties are allowed.
struct RankingSheet {
  std::string criterion;
  std::vector<std::string> annotators;
  std::vector<std::string> items;
  std::vector<std::string> systems;
  // ranks[a][i][s], indexed per the vectors above
  std::vector<std::vector<std::vector<int>>> ranks;

  void validate() const;  // throws FormatError on structural gaps
};

// CSV with header annotator,item,criterion,system,rank; one sheet per
// criterion found in the file.
std::vector<RankingSheet> load_ranking_csv(const std::filesystem::path& path);

struct MarReport {
  // system -> annotator -> mean rank over items
  std::map<std::string, std::map<std::string, double>> per_annotator;
  // system -> mean of the per-annotator MARs
  std::map<std::string, double> average;
};

MarReport mean_average_rank(const RankingSheet& sheet);

enum class AlphaMetric { Ordinal, Interval };

AlphaMetric alpha_metric_from_string(std::string_view s);

struct AlphaResult {
  double value = 0.0;
  bool degenerate = false;  // zero expected disagreement; 1.0 by convention
  std::string note;
};

// Krippendorff's alpha over the sheet's ranks, units = (item, system) pairs.
// Requires >= 2 annotators and >= 2 items (DegenerateData otherwise).
AlphaResult krippendorff_alpha(const RankingSheet& sheet, AlphaMetric metric = AlphaMetric::Ordinal);

struct EvalReport {
  std::string strategy;
  std::string manifest_digest;
  std::map<std::string, double> per_challenge_macro_f1;  // "overall" + per tag
  std::map<std::string, ConfusionCounts> per_challenge_counts;
  long scored = 0;
  long unknown_count = 0;
  long skipped_unlabeled = 0;
  // criterion -> metrics (filled when ranking sheets are supplied)
  std::map<std::string, MarReport> mar;
  std::map<std::string, AlphaResult> alpha;

  nlohmann::json to_json() const;
  // Fixed-width table, one row per strategy, one column per challenge.
  std::string render_table() const;
};

EvalReport score_traces(const TraceFile& file);

// Scores a pre-computed predictions file (id -> label) against gold claims;
// ids present in predictions but not in gold are reported as diagnostics.
EvalReport score_predictions(const std::vector<std::pair<std::string, Label>>& predictions,
                             const std::vector<Claim>& gold_claims,
                             std::vector<std::string>* diagnostics = nullptr);

void attach_rankings(EvalReport& report, const std::vector<RankingSheet>& sheets,
                     AlphaMetric metric);

// Predictions file: JSONL {"id": ..., "label": ...}.
std::vector<std::pair<std::string, Label>> load_predictions(const std::filesystem::path& path);

}  // namespace folk

#endif  // FOLK_EVALSUITE_HPP
