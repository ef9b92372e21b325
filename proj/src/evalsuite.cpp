#include "folk/evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "folk/digest.hpp"
#include "folk/errors.hpp"
#include "folk/text.hpp"

namespace folk {

using nlohmann::json;

DatasetFormat dataset_format_from_string(std::string_view s) {
  std::string v = to_lower(s);
  if (v == "hover") return DatasetFormat::HoVerJson;
  if (v == "feverous") return DatasetFormat::FeverousJson;
  if (v == "scifact" || v == "scifact_open") return DatasetFormat::SciFactJson;
  if (v == "generic" || v == "jsonl") return DatasetFormat::GenericJsonl;
  throw ConfigError("unknown dataset format: " + std::string(s));
}

std::string to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::HoVerJson: return "hover";
    case DatasetFormat::FeverousJson: return "feverous";
    case DatasetFormat::SciFactJson: return "scifact";
    case DatasetFormat::GenericJsonl: return "generic";
  }
  return "generic";
}

FieldMapping FieldMapping::defaults(DatasetFormat format) {
  FieldMapping m;
  switch (format) {
    case DatasetFormat::HoVerJson:
      m.id_field = "uid";
      m.label_map = {{"SUPPORTED", "SUPPORTED"}, {"NOT_SUPPORTED", "NOT_SUPPORTED"}};
      m.hops_field = "num_hops";
      break;
    case DatasetFormat::FeverousJson:
      m.label_map = {{"SUPPORTS", "SUPPORTED"}, {"REFUTES", "NOT_SUPPORTED"}};
      m.challenge_field = "challenge";
      m.challenge_map = {{"Numerical Reasoning", "numerical"},
                         {"Multi-hop Reasoning", "multihop"},
                         {"Combining Tables and Text", "text_and_table"}};
      break;
    case DatasetFormat::SciFactJson:
      m.evidence_field = "evidence";
      m.default_challenge = Challenge::Scientific;
      break;
    case DatasetFormat::GenericJsonl:
      m.label_map = {{"SUPPORTED", "SUPPORTED"},
                     {"NOT_SUPPORTED", "NOT_SUPPORTED"},
                     {"SUPPORTS", "SUPPORTED"},
                     {"REFUTES", "NOT_SUPPORTED"}};
      m.challenge_field = "challenge";
      break;
  }
  return m;
}

DatasetFile DatasetFile::with_defaults(std::filesystem::path path, DatasetFormat format) {
  DatasetFile f;
  f.path = std::move(path);
  f.format = format;
  f.mapping = FieldMapping::defaults(format);
  return f;
}

namespace {

DatasetTag dataset_tag_for(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::HoVerJson: return DatasetTag::HoVer;
    case DatasetFormat::FeverousJson: return DatasetTag::Feverous;
    case DatasetFormat::SciFactJson: return DatasetTag::SciFactOpen;
    case DatasetFormat::GenericJsonl: return DatasetTag::Custom;
  }
  return DatasetTag::Custom;
}

std::string record_id(const json& rec, const FieldMapping& m, long record_no) {
  if (rec.contains(m.id_field)) {
    const json& v = rec[m.id_field];
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long>());
  }
  return "record-" + std::to_string(record_no);
}

// SciFact-Open: only claims whose evidence uniformly supports or refutes get
// a global label; everything else is skipped.
std::optional<Label> scifact_label(const json& rec, const FieldMapping& m, std::string* why) {
  if (!rec.contains(m.evidence_field) || !rec[m.evidence_field].is_object() ||
      rec[m.evidence_field].empty()) {
    *why = "no evidence";
    return std::nullopt;
  }
  bool any_support = false, any_contradict = false;
  for (const auto& [doc, entries] : rec[m.evidence_field].items()) {
    (void)doc;
    if (!entries.is_array()) continue;
    for (const json& e : entries) {
      std::string lab = to_lower(e.value("label", ""));
      if (lab == "support" || lab == "supports") any_support = true;
      else if (lab == "contradict" || lab == "refutes") any_contradict = true;
    }
  }
  if (any_support == any_contradict) {
    *why = any_support ? "mixed evidence" : "no evidence labels";
    return std::nullopt;
  }
  return any_support ? Label::Supported : Label::NotSupported;
}

std::vector<json> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageFailure("cannot open dataset: " + path.string());
  std::vector<json> records;
  // A dataset is either JSONL or one top-level JSON array.
  char first = 0;
  in >> std::ws;
  first = static_cast<char>(in.peek());
  if (first == '[') {
    json all;
    try {
      in >> all;
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
    if (!all.is_array()) throw FormatError(path.string() + ": expected a JSON array");
    for (json& rec : all) records.push_back(std::move(rec));
    return records;
  }
  std::string line;
  int line_no = 0;
  in.seekg(0);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace

LoadResult load_dataset(const DatasetFile& file) {
  const FieldMapping& m = file.mapping;
  LoadResult out;
  long record_no = 0;
  std::set<std::string> seen_ids;
  for (const json& rec : read_records(file.path)) {
    ++record_no;
    if (!rec.is_object()) {
      out.diagnostics.push_back("record " + std::to_string(record_no) + ": not an object");
      continue;
    }
    Claim claim;
    claim.id = record_id(rec, m, record_no);
    claim.dataset = dataset_tag_for(file.format);
    claim.challenge = m.default_challenge;
    if (!rec.contains(m.claim_field) || !rec[m.claim_field].is_string()) {
      out.diagnostics.push_back("record " + claim.id + ": missing claim text");
      continue;
    }
    claim.text = rec[m.claim_field].get<std::string>();
    if (trim(claim.text).empty()) {
      out.diagnostics.push_back("record " + claim.id + ": empty claim text");
      continue;
    }

    if (!seen_ids.insert(claim.id).second) {
      out.diagnostics.push_back("record " + claim.id + " skipped: duplicate id");
      continue;
    }

    if (file.format == DatasetFormat::SciFactJson) {
      std::string why;
      std::optional<Label> label = scifact_label(rec, m, &why);
      if (!label) {
        out.diagnostics.push_back("record " + claim.id + " skipped: " + why);
        continue;
      }
      claim.gold_label = label;
    } else if (rec.contains(m.label_field)) {
      std::string source = rec[m.label_field].is_string()
                               ? rec[m.label_field].get<std::string>()
                               : rec[m.label_field].dump();
      auto it = m.label_map.find(source);
      if (it != m.label_map.end()) {
        claim.gold_label = label_from_string(it->second);
      } else {
        out.diagnostics.push_back("record " + claim.id + " skipped: unmapped label '" + source +
                                  "'");
        continue;
      }
    } else if (file.format != DatasetFormat::GenericJsonl) {
      // benchmark formats always carry labels; only generic records may be
      // unlabeled (verify-only use)
      out.diagnostics.push_back("record " + claim.id + " skipped: missing label");
      continue;
    }

    if (!m.hops_field.empty() && rec.contains(m.hops_field) &&
        rec[m.hops_field].is_number_integer()) {
      switch (rec[m.hops_field].get<int>()) {
        case 2: claim.challenge = Challenge::TwoHop; break;
        case 3: claim.challenge = Challenge::ThreeHop; break;
        case 4: claim.challenge = Challenge::FourHop; break;
        default:
          out.diagnostics.push_back("record " + claim.id + ": unexpected hop count " +
                                    std::to_string(rec[m.hops_field].get<int>()));
          break;
      }
    }
    if (!m.challenge_field.empty() && rec.contains(m.challenge_field) &&
        rec[m.challenge_field].is_string()) {
      std::string raw = rec[m.challenge_field].get<std::string>();
      auto it = m.challenge_map.find(raw);
      std::string canonical = it != m.challenge_map.end() ? it->second : raw;
      try {
        claim.challenge = challenge_from_string(canonical);
      } catch (const ConfigError&) {
        out.diagnostics.push_back("record " + claim.id + ": unknown challenge '" + raw + "'");
      }
    }
    out.claims.push_back(std::move(claim));
  }
  return out;
}

std::vector<Claim> stratified_sample(const std::vector<Claim>& claims, int n, std::uint64_t seed) {
  if (n <= 0) throw ConfigError("sample size must be positive");

  std::vector<std::size_t> supported, not_supported;
  for (std::size_t i = 0; i < claims.size(); ++i) {
    if (!claims[i].gold_label) continue;  // unlabeled claims cannot stratify
    (*claims[i].gold_label == Label::Supported ? supported : not_supported).push_back(i);
  }

  std::size_t ceil_half = (static_cast<std::size_t>(n) + 1) / 2;
  std::size_t floor_half = static_cast<std::size_t>(n) / 2;
  // The larger class absorbs the odd element; ties favor SUPPORTED.
  std::size_t quota_s = supported.size() >= not_supported.size() ? ceil_half : floor_half;
  std::size_t quota_n = static_cast<std::size_t>(n) - quota_s;

  if (supported.size() < quota_s)
    throw InsufficientClass("SUPPORTED has " + std::to_string(supported.size()) +
                            " claims, need " + std::to_string(quota_s));
  if (not_supported.size() < quota_n)
    throw InsufficientClass("NOT_SUPPORTED has " + std::to_string(not_supported.size()) +
                            " claims, need " + std::to_string(quota_n));

  auto pick = [&](std::vector<std::size_t>& pool, std::size_t quota) {
    std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
      std::uint64_t ka = keyed_hash64(seed, claims[a].id);
      std::uint64_t kb = keyed_hash64(seed, claims[b].id);
      if (ka != kb) return ka < kb;
      return a < b;
    });
    pool.resize(quota);
  };
  pick(supported, quota_s);
  pick(not_supported, quota_n);

  std::vector<bool> chosen(claims.size(), false);
  for (std::size_t i : supported) chosen[i] = true;
  for (std::size_t i : not_supported) chosen[i] = true;

  std::vector<Claim> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < claims.size(); ++i)
    if (chosen[i]) out.push_back(claims[i]);
  return out;
}

ConfusionCounts confusion_counts(const std::vector<Label>& pred, const std::vector<Label>& gold) {
  if (pred.size() != gold.size())
    throw LengthMismatch("pred has " + std::to_string(pred.size()) + " labels, gold has " +
                         std::to_string(gold.size()));
  ConfusionCounts c;
  c.total = static_cast<long>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (gold[i] == Label::Unknown)
      throw Error("gold labels must be SUPPORTED or NOT_SUPPORTED");
    ClassCounts& gold_class = gold[i] == Label::Supported ? c.supported : c.not_supported;
    if (pred[i] == Label::Unknown) {
      // Unknown predictions are wrong for the gold class and form no class.
      c.unknown_predictions++;
      gold_class.fn++;
    } else if (pred[i] == gold[i]) {
      gold_class.tp++;
    } else {
      gold_class.fn++;
      (pred[i] == Label::Supported ? c.supported : c.not_supported).fp++;
    }
  }
  return c;
}

double macro_f1(const std::vector<Label>& pred, const std::vector<Label>& gold) {
  ConfusionCounts c = confusion_counts(pred, gold);
  double sum = 0.0;
  int classes = 0;
  // A class joins the mean when gold contains it, or it was (wrongly)
  // predicted into a gold set that lacks it.
  const ClassCounts* counts[2] = {&c.supported, &c.not_supported};
  for (const ClassCounts* cc : counts) {
    bool in_gold = cc->tp + cc->fn > 0;
    bool predicted = cc->tp + cc->fp > 0;
    if (in_gold || predicted) {
      sum += cc->f1();
      classes++;
    }
  }
  return classes == 0 ? 0.0 : sum / classes;
}

void RankingSheet::validate() const {
  if (annotators.size() < 1 || items.size() < 1 || systems.size() < 1)
    throw FormatError("ranking sheet is empty");
  if (ranks.size() != annotators.size()) throw FormatError("ranking sheet: bad annotator axis");
  for (std::size_t a = 0; a < ranks.size(); ++a) {
    if (ranks[a].size() != items.size()) throw FormatError("ranking sheet: bad item axis");
    for (std::size_t i = 0; i < ranks[a].size(); ++i) {
      if (ranks[a][i].size() != systems.size())
        throw FormatError("ranking sheet: bad system axis");
      for (int r : ranks[a][i]) {
        if (r < 1)
          throw FormatError("ranking sheet: missing rank for (" + annotators[a] + ", " +
                            items[i] + ")");
      }
    }
  }
}

std::vector<RankingSheet> load_ranking_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageFailure("cannot open ranking sheet: " + path.string());

  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
  ++line_no;
  if (normalize_ws(to_lower(line)) != "annotator,item,criterion,system,rank")
    throw FormatError(path.string() + ": expected header annotator,item,criterion,system,rank");

  struct Cell {
    std::string annotator, item, system;
    int rank;
  };
  std::map<std::string, std::vector<Cell>> by_criterion;
  std::map<std::string, int> criterion_order;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(trim(col));
    if (cols.size() != 5)
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 5 columns");
    int rank = 0;
    try {
      rank = std::stoi(cols[4]);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad rank '" + cols[4] +
                        "'");
    }
    if (rank < 1)
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": rank must be >= 1");
    criterion_order.emplace(cols[2], static_cast<int>(criterion_order.size()));
    by_criterion[cols[2]].push_back({cols[0], cols[1], cols[3], rank});
  }

  std::vector<std::pair<std::string, int>> ordered(criterion_order.begin(), criterion_order.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });

  std::vector<RankingSheet> sheets;
  for (const auto& [criterion, _] : ordered) {
    const std::vector<Cell>& cells = by_criterion[criterion];
    RankingSheet sheet;
    sheet.criterion = criterion;
    auto index_of = [](std::vector<std::string>& v, const std::string& name) {
      auto it = std::find(v.begin(), v.end(), name);
      if (it != v.end()) return static_cast<std::size_t>(it - v.begin());
      v.push_back(name);
      return v.size() - 1;
    };
    for (const Cell& c : cells) {
      index_of(sheet.annotators, c.annotator);
      index_of(sheet.items, c.item);
      index_of(sheet.systems, c.system);
    }
    sheet.ranks.assign(sheet.annotators.size(),
                       std::vector<std::vector<int>>(
                           sheet.items.size(), std::vector<int>(sheet.systems.size(), 0)));
    for (const Cell& c : cells) {
      std::size_t a = index_of(sheet.annotators, c.annotator);
      std::size_t i = index_of(sheet.items, c.item);
      std::size_t s = index_of(sheet.systems, c.system);
      if (sheet.ranks[a][i][s] != 0)
        throw FormatError(path.string() + ": duplicate cell (" + c.annotator + ", " + c.item +
                          ", " + criterion + ", " + c.system + ")");
      sheet.ranks[a][i][s] = c.rank;
    }
    sheet.validate();
    sheets.push_back(std::move(sheet));
  }
  return sheets;
}

MarReport mean_average_rank(const RankingSheet& sheet) {
  sheet.validate();
  MarReport report;
  for (std::size_t s = 0; s < sheet.systems.size(); ++s) {
    double annotator_sum = 0.0;
    for (std::size_t a = 0; a < sheet.annotators.size(); ++a) {
      double sum = 0.0;
      for (std::size_t i = 0; i < sheet.items.size(); ++i) sum += sheet.ranks[a][i][s];
      double mar = sum / static_cast<double>(sheet.items.size());
      report.per_annotator[sheet.systems[s]][sheet.annotators[a]] = mar;
      annotator_sum += mar;
    }
    report.average[sheet.systems[s]] = annotator_sum / static_cast<double>(sheet.annotators.size());
  }
  return report;
}

AlphaMetric alpha_metric_from_string(std::string_view s) {
  std::string v = to_lower(s);
  if (v == "ordinal") return AlphaMetric::Ordinal;
  if (v == "interval") return AlphaMetric::Interval;
  throw ConfigError("unknown alpha metric: " + std::string(s));
}

AlphaResult krippendorff_alpha(const RankingSheet& sheet, AlphaMetric metric) {
  sheet.validate();
  if (sheet.annotators.size() < 2)
    throw DegenerateData("alpha requires at least 2 annotators");
  if (sheet.items.size() < 2) throw DegenerateData("alpha requires at least 2 items");

  // Units are (item, system) pairs; every annotator rated every unit.
  std::vector<std::vector<int>> units;
  units.reserve(sheet.items.size() * sheet.systems.size());
  for (std::size_t i = 0; i < sheet.items.size(); ++i) {
    for (std::size_t s = 0; s < sheet.systems.size(); ++s) {
      std::vector<int> ratings;
      ratings.reserve(sheet.annotators.size());
      for (std::size_t a = 0; a < sheet.annotators.size(); ++a)
        ratings.push_back(sheet.ranks[a][i][s]);
      units.push_back(std::move(ratings));
    }
  }

  std::vector<int> values;
  for (const std::vector<int>& u : units)
    for (int v : u)
      if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
  std::sort(values.begin(), values.end());
  std::map<int, std::size_t> value_index;
  for (std::size_t i = 0; i < values.size(); ++i) value_index[values[i]] = i;
  std::size_t k = values.size();

  // Coincidence matrix from ordered pairs within units.
  std::vector<std::vector<double>> o(k, std::vector<double>(k, 0.0));
  for (const std::vector<int>& u : units) {
    double w = 1.0 / static_cast<double>(u.size() - 1);
    for (std::size_t a = 0; a < u.size(); ++a)
      for (std::size_t b = 0; b < u.size(); ++b)
        if (a != b) o[value_index[u[a]]][value_index[u[b]]] += w;
  }
  std::vector<double> marginal(k, 0.0);
  double n = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) marginal[c] += o[c][d];
    n += marginal[c];
  }

  auto delta_sq = [&](std::size_t c, std::size_t d) -> double {
    if (metric == AlphaMetric::Interval) {
      double diff = values[c] - values[d];
      return diff * diff;
    }
    // ordinal: cumulative marginal mass between the two values
    std::size_t lo = std::min(c, d), hi = std::max(c, d);
    double between = 0.0;
    for (std::size_t g = lo; g <= hi; ++g) between += marginal[g];
    double x = between - (marginal[c] + marginal[d]) / 2.0;
    return x * x;
  };

  double d_observed = 0.0, d_expected = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) {
      if (c == d) continue;
      double dd = delta_sq(c, d);
      d_observed += o[c][d] * dd;
      d_expected += marginal[c] * marginal[d] * dd;
    }
  }
  d_observed /= n;
  d_expected /= n * (n - 1.0);

  AlphaResult result;
  if (d_expected == 0.0) {
    result.value = 1.0;
    result.degenerate = true;
    result.note = "zero expected disagreement; alpha is 1.0 by convention";
    return result;
  }
  result.value = 1.0 - d_observed / d_expected;
  return result;
}

json EvalReport::to_json() const {
  json counts = json::object();
  for (const auto& [tag, c] : per_challenge_counts) {
    counts[tag] = json{{"supported", json{{"tp", c.supported.tp},
                                          {"fp", c.supported.fp},
                                          {"fn", c.supported.fn}}},
                       {"not_supported", json{{"tp", c.not_supported.tp},
                                              {"fp", c.not_supported.fp},
                                              {"fn", c.not_supported.fn}}},
                       {"unknown_predictions", c.unknown_predictions},
                       {"total", c.total}};
  }
  json mar_json = json::object();
  for (const auto& [criterion, report] : mar) {
    json systems = json::object();
    for (const auto& [system, per_annot] : report.per_annotator) {
      systems[system] = json{{"per_annotator", per_annot},
                             {"average", report.average.at(system)}};
    }
    mar_json[criterion] = systems;
  }
  json alpha_json = json::object();
  for (const auto& [criterion, a] : alpha)
    alpha_json[criterion] = json{{"value", a.value}, {"degenerate", a.degenerate}, {"note", a.note}};

  return json{{"strategy", strategy},
              {"manifest_digest", manifest_digest},
              {"macro_f1", per_challenge_macro_f1},
              {"confusion", counts},
              {"scored", scored},
              {"unknown_count", unknown_count},
              {"skipped_unlabeled", skipped_unlabeled},
              {"mar", mar_json},
              {"alpha", alpha_json}};
}

std::string EvalReport::render_table() const {
  // Canonical column order mirrors the paper's results table.
  const char* canonical[] = {"2hop",     "3hop",    "4hop",       "numerical",
                             "multihop", "text_and_table", "scientific", "none",
                             "overall"};
  std::vector<std::string> columns;
  for (const char* tag : canonical)
    if (per_challenge_macro_f1.count(tag)) columns.push_back(tag);

  std::ostringstream out;
  std::size_t name_width = std::max<std::size_t>(8, strategy.size() + 2);
  out << std::string(name_width, ' ');
  for (const std::string& col : columns) {
    std::size_t w = std::max<std::size_t>(col.size() + 2, 8);
    out << std::string(w - col.size(), ' ') << col;
  }
  out << '\n' << strategy << std::string(name_width - strategy.size(), ' ');
  for (const std::string& col : columns) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", per_challenge_macro_f1.at(col) * 100.0);
    std::size_t w = std::max<std::size_t>(col.size() + 2, 8);
    std::string cell(buf);
    out << std::string(w - cell.size(), ' ') << cell;
  }
  out << '\n';
  return out.str();
}

namespace {

EvalReport score_pairs(const std::vector<std::tuple<std::string, Label, Label, Challenge>>& rows) {
  EvalReport report;
  std::map<std::string, std::pair<std::vector<Label>, std::vector<Label>>> groups;
  std::pair<std::vector<Label>, std::vector<Label>> overall;
  for (const auto& [id, pred, gold, challenge] : rows) {
    (void)id;
    overall.first.push_back(pred);
    overall.second.push_back(gold);
    auto& group = groups[to_string(challenge)];
    group.first.push_back(pred);
    group.second.push_back(gold);
    if (pred == Label::Unknown) report.unknown_count++;
  }
  report.scored = static_cast<long>(rows.size());
  if (!rows.empty()) {
    report.per_challenge_macro_f1["overall"] = macro_f1(overall.first, overall.second);
    report.per_challenge_counts["overall"] = confusion_counts(overall.first, overall.second);
    for (const auto& [tag, group] : groups) {
      report.per_challenge_macro_f1[tag] = macro_f1(group.first, group.second);
      report.per_challenge_counts[tag] = confusion_counts(group.first, group.second);
    }
  }
  return report;
}

}  // namespace

EvalReport score_traces(const TraceFile& file) {
  std::vector<std::tuple<std::string, Label, Label, Challenge>> rows;
  long skipped = 0;
  for (const VerdictTrace& t : file.traces) {
    if (!t.claim.gold_label) {
      skipped++;
      continue;
    }
    rows.emplace_back(t.claim.id, t.final_label, *t.claim.gold_label, t.claim.challenge);
  }
  EvalReport report = score_pairs(rows);
  report.strategy = file.manifest.strategy;
  report.skipped_unlabeled = skipped;
  report.manifest_digest = sha256_hex(file.manifest.to_json().dump());
  return report;
}

EvalReport score_predictions(const std::vector<std::pair<std::string, Label>>& predictions,
                             const std::vector<Claim>& gold_claims,
                             std::vector<std::string>* diagnostics) {
  std::map<std::string, Label> by_id(predictions.begin(), predictions.end());
  std::vector<std::tuple<std::string, Label, Label, Challenge>> rows;
  long skipped = 0;
  std::size_t used = 0;
  for (const Claim& c : gold_claims) {
    if (!c.gold_label) {
      skipped++;
      continue;
    }
    auto it = by_id.find(c.id);
    Label pred = Label::Unknown;
    if (it != by_id.end()) {
      pred = it->second;
      used++;
    } else if (diagnostics) {
      diagnostics->push_back("no prediction for claim " + c.id + "; scored as Unknown");
    }
    rows.emplace_back(c.id, pred, *c.gold_label, c.challenge);
  }
  if (diagnostics && used < by_id.size())
    diagnostics->push_back(std::to_string(by_id.size() - used) +
                           " prediction(s) matched no gold claim");
  EvalReport report = score_pairs(rows);
  report.strategy = "external";
  report.skipped_unlabeled = skipped;
  return report;
}

void attach_rankings(EvalReport& report, const std::vector<RankingSheet>& sheets,
                     AlphaMetric metric) {
  for (const RankingSheet& sheet : sheets) {
    report.mar[sheet.criterion] = mean_average_rank(sheet);
    report.alpha[sheet.criterion] = krippendorff_alpha(sheet, metric);
  }
}

std::vector<std::pair<std::string, Label>> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw StorageFailure("cannot open predictions: " + path.string());
  std::vector<std::pair<std::string, Label>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      out.emplace_back(j.at("id").get<std::string>(),
                       label_from_string(j.at("label").get<std::string>()));
    } catch (const std::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace folk
