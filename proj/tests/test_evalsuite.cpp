#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

#include "folk/errors.hpp"
#include "folk/evalsuite.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace folk;

namespace {

Label random_pred(std::mt19937& rng) {
  std::uniform_int_distribution<int> d(0, 2);
  int v = d(rng);
  return v == 0 ? Label::Supported : v == 1 ? Label::NotSupported : Label::Unknown;
}

Label random_gold(std::mt19937& rng) {
  std::uniform_int_distribution<int> d(0, 1);
  return d(rng) == 0 ? Label::Supported : Label::NotSupported;
}

}  // namespace

TEST_CASE("macro_f1 basics") {
  using L = Label;
  CHECK(macro_f1({L::Supported, L::NotSupported, L::Supported},
                 {L::Supported, L::NotSupported, L::Supported}) == doctest::Approx(1.0));
  // total inversion in a binary task scores zero
  CHECK(macro_f1({L::NotSupported, L::NotSupported, L::Supported, L::Supported},
                 {L::Supported, L::Supported, L::NotSupported, L::NotSupported}) ==
        doctest::Approx(0.0));
  CHECK_THROWS_AS(macro_f1({L::Supported}, {L::Supported, L::NotSupported}), LengthMismatch);
}

TEST_CASE("macro_f1 worked example agrees with the brute-force oracle") {
  using L = Label;
  std::vector<Label> gold{L::Supported, L::Supported, L::Supported, L::NotSupported,
                          L::NotSupported};
  std::vector<Label> pred{L::Supported, L::Supported, L::NotSupported, L::NotSupported,
                          L::NotSupported};
  // Confusion: SUPPORTED tp=2 fp=0 fn=1 -> P=1, R=2/3, F1=0.8;
  // NOT_SUPPORTED tp=2 fp=1 fn=0 -> P=2/3, R=1, F1=0.8; macro = 0.8.
  double expected = test::oracle_macro_f1(pred, gold);
  CHECK(expected == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(macro_f1(pred, gold) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("macro_f1 equals the oracle on all short vectors and on random long ones") {
  using L = Label;
  const Label preds[] = {L::Supported, L::NotSupported, L::Unknown};
  const Label golds[] = {L::Supported, L::NotSupported};

  // exhaustive over lengths 1..4 (3^n predictions x 2^n golds)
  for (int n = 1; n <= 4; ++n) {
    long pred_total = 1, gold_total = 1;
    for (int i = 0; i < n; ++i) {
      pred_total *= 3;
      gold_total *= 2;
    }
    for (long pm = 0; pm < pred_total; ++pm) {
      std::vector<Label> pred;
      long p = pm;
      for (int i = 0; i < n; ++i) {
        pred.push_back(preds[p % 3]);
        p /= 3;
      }
      for (long gm = 0; gm < gold_total; ++gm) {
        std::vector<Label> gold;
        long g = gm;
        for (int i = 0; i < n; ++i) {
          gold.push_back(golds[g % 2]);
          g /= 2;
        }
        REQUIRE(macro_f1(pred, gold) ==
                doctest::Approx(test::oracle_macro_f1(pred, gold)).epsilon(1e-12));
      }
    }
  }

  // random vectors up to length 8
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> len(1, 8);
  for (int trial = 0; trial < 10000; ++trial) {
    int n = len(rng);
    std::vector<Label> pred, gold;
    for (int i = 0; i < n; ++i) {
      pred.push_back(random_pred(rng));
      gold.push_back(random_gold(rng));
    }
    REQUIRE(macro_f1(pred, gold) == doctest::Approx(test::oracle_macro_f1(pred, gold)).epsilon(1e-12));
  }
}

TEST_CASE("macro_f1 is symmetric under relabeling both sides") {
  std::mt19937 rng(7);
  auto flip = [](Label l) {
    return l == Label::Supported ? Label::NotSupported
           : l == Label::NotSupported ? Label::Supported
                                      : Label::Unknown;
  };
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<int> len(1, 10);
    int n = len(rng);
    std::vector<Label> pred, gold, pred_f, gold_f;
    for (int i = 0; i < n; ++i) {
      pred.push_back(random_pred(rng));
      gold.push_back(random_gold(rng));
      pred_f.push_back(flip(pred.back()));
      gold_f.push_back(flip(gold.back()));
    }
    CHECK(macro_f1(pred, gold) == doctest::Approx(macro_f1(pred_f, gold_f)).epsilon(1e-12));
  }
}

TEST_CASE("load_dataset handles the four formats") {
  test::TempDir dir;

  SUBCASE("generic jsonl") {
    test::write_file(dir.file("g.jsonl"),
                     R"({"id": "c1", "claim": "Water boils.", "label": "SUPPORTED"})"
                     "\n"
                     R"({"id": "c2", "claim": "Stones float.", "label": "REFUTES"})"
                     "\n"
                     R"({"id": "c3", "claim": "No label here."})"
                     "\n");
    LoadResult r = load_dataset(
        DatasetFile::with_defaults(dir.file("g.jsonl"), DatasetFormat::GenericJsonl));
    REQUIRE(r.claims.size() == 3);
    CHECK(r.claims[0].gold_label == Label::Supported);
    CHECK(r.claims[1].gold_label == Label::NotSupported);
    CHECK(!r.claims[2].gold_label.has_value());
  }

  SUBCASE("hover records carry hop challenges") {
    test::write_file(dir.file("h.jsonl"),
                     R"({"uid": "h1", "claim": "A and B.", "label": "SUPPORTED", "num_hops": 4})"
                     "\n"
                     R"({"uid": "h2", "claim": "C.", "label": "NOT_SUPPORTED", "num_hops": 2})"
                     "\n");
    LoadResult r =
        load_dataset(DatasetFile::with_defaults(dir.file("h.jsonl"), DatasetFormat::HoVerJson));
    REQUIRE(r.claims.size() == 2);
    CHECK(r.claims[0].challenge == Challenge::FourHop);
    CHECK(r.claims[0].dataset == DatasetTag::HoVer);
    CHECK(r.claims[1].challenge == Challenge::TwoHop);
  }

  SUBCASE("feverous labels and challenges map to canonical names") {
    test::write_file(
        dir.file("f.jsonl"),
        R"({"id": 7, "claim": "X.", "label": "SUPPORTS", "challenge": "Numerical Reasoning"})"
        "\n"
        R"({"id": 8, "claim": "Y.", "label": "NOT ENOUGH INFO", "challenge": "Multi-hop Reasoning"})"
        "\n");
    LoadResult r = load_dataset(
        DatasetFile::with_defaults(dir.file("f.jsonl"), DatasetFormat::FeverousJson));
    REQUIRE(r.claims.size() == 1);  // NEI record skipped
    CHECK(r.claims[0].gold_label == Label::Supported);
    CHECK(r.claims[0].challenge == Challenge::Numerical);
    CHECK(r.diagnostics.size() == 1);
  }

  SUBCASE("scifact needs complete single-polarity evidence") {
    test::write_file(
        dir.file("s.jsonl"),
        R"({"id": 1, "claim": "S1.", "evidence": {"d1": [{"label": "SUPPORT"}], "d2": [{"label": "SUPPORT"}]}})"
        "\n"
        R"({"id": 2, "claim": "S2.", "evidence": {"d1": [{"label": "CONTRADICT"}]}})"
        "\n"
        R"({"id": 3, "claim": "S3.", "evidence": {"d1": [{"label": "SUPPORT"}, {"label": "CONTRADICT"}]}})"
        "\n"
        R"({"id": 4, "claim": "S4.", "evidence": {}})"
        "\n");
    LoadResult r =
        load_dataset(DatasetFile::with_defaults(dir.file("s.jsonl"), DatasetFormat::SciFactJson));
    REQUIRE(r.claims.size() == 2);
    CHECK(r.claims[0].gold_label == Label::Supported);
    CHECK(r.claims[0].challenge == Challenge::Scientific);
    CHECK(r.claims[1].gold_label == Label::NotSupported);
    CHECK(r.diagnostics.size() == 2);
  }

  SUBCASE("duplicate ids are skipped with a diagnostic") {
    test::write_file(dir.file("dup.jsonl"),
                     R"({"id": "c1", "claim": "X.", "label": "SUPPORTED"})"
                     "\n"
                     R"({"id": "c1", "claim": "Y.", "label": "SUPPORTED"})"
                     "\n");
    LoadResult r = load_dataset(
        DatasetFile::with_defaults(dir.file("dup.jsonl"), DatasetFormat::GenericJsonl));
    CHECK(r.claims.size() == 1);
    CHECK(r.diagnostics.size() == 1);
  }

  SUBCASE("benchmark formats require labels") {
    test::write_file(dir.file("nolabel.jsonl"), R"({"uid": "h1", "claim": "A."})" "\n");
    LoadResult r = load_dataset(
        DatasetFile::with_defaults(dir.file("nolabel.jsonl"), DatasetFormat::HoVerJson));
    CHECK(r.claims.empty());
    CHECK(r.diagnostics.size() == 1);
  }

  SUBCASE("a top-level json array also loads") {
    test::write_file(dir.file("a.json"),
                     R"([{"id": "c1", "claim": "X.", "label": "SUPPORTED"}])");
    LoadResult r =
        load_dataset(DatasetFile::with_defaults(dir.file("a.json"), DatasetFormat::GenericJsonl));
    CHECK(r.claims.size() == 1);
  }

  SUBCASE("parse errors carry the line number") {
    test::write_file(dir.file("bad.jsonl"), "{\"id\": \"c1\"\nnot json\n");
    try {
      load_dataset(DatasetFile::with_defaults(dir.file("bad.jsonl"), DatasetFormat::GenericJsonl));
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find(":1") != std::string::npos);
    }
  }
}

namespace {

std::vector<Claim> label_pool(int supported, int not_supported) {
  std::vector<Claim> out;
  for (int i = 0; i < supported + not_supported; ++i) {
    Claim c;
    c.id = "p" + std::to_string(i);
    c.text = "claim " + std::to_string(i);
    c.gold_label = i < supported ? Label::Supported : Label::NotSupported;
    out.push_back(std::move(c));
  }
  return out;
}

std::pair<int, int> count_labels(const std::vector<Claim>& claims) {
  int s = 0, n = 0;
  for (const Claim& c : claims) {
    if (c.gold_label == Label::Supported) s++;
    else if (c.gold_label == Label::NotSupported) n++;
  }
  return {s, n};
}

}  // namespace

TEST_CASE("stratified_sample balances labels deterministically") {
  SUBCASE("even pools split evenly") {
    std::vector<Claim> pool = label_pool(100, 100);
    std::vector<Claim> sample = stratified_sample(pool, 100, 7);
    REQUIRE(sample.size() == 100);
    CHECK(count_labels(sample) == std::pair<int, int>{50, 50});

    std::vector<Claim> again = stratified_sample(pool, 100, 7);
    REQUIRE(again.size() == sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) CHECK(again[i].id == sample[i].id);
  }

  SUBCASE("uneven pools still yield a balanced draw") {
    std::vector<Claim> sample = stratified_sample(label_pool(90, 60), 100, 3);
    CHECK(count_labels(sample) == std::pair<int, int>{50, 50});
  }

  SUBCASE("odd n gives the extra slot to the larger class") {
    std::vector<Claim> sample = stratified_sample(label_pool(40, 20), 11, 3);
    CHECK(count_labels(sample) == std::pair<int, int>{6, 5});
    std::vector<Claim> flipped = stratified_sample(label_pool(20, 40), 11, 3);
    CHECK(count_labels(flipped) == std::pair<int, int>{5, 6});
  }

  SUBCASE("the label multiset is invariant across seeds; identities vary") {
    std::vector<Claim> pool = label_pool(80, 70);
    std::vector<Claim> a = stratified_sample(pool, 60, 1);
    std::vector<Claim> b = stratified_sample(pool, 60, 2);
    CHECK(count_labels(a) == count_labels(b));
    std::set<std::string> ids_a, ids_b;
    for (const Claim& c : a) ids_a.insert(c.id);
    for (const Claim& c : b) ids_b.insert(c.id);
    CHECK(ids_a != ids_b);  // overwhelmingly likely for these pool sizes
  }

  SUBCASE("insufficient class members fail loudly") {
    CHECK_THROWS_AS(stratified_sample(label_pool(10, 100), 100, 7), InsufficientClass);
  }
}

TEST_CASE("mean average rank follows the per-annotator definition") {
  SUBCASE("constant rank 1 gives MAR 1.0") {
    std::vector<std::vector<int>> units(6, std::vector<int>{1, 1});  // 2 annotators agree
    RankingSheet sheet = test::sheet_from_units(units, 2, 2);
    for (std::size_t a = 0; a < sheet.annotators.size(); ++a)
      for (std::size_t i = 0; i < sheet.items.size(); ++i)
        for (std::size_t s = 0; s < sheet.systems.size(); ++s) sheet.ranks[a][i][s] = 1;
    MarReport report = mean_average_rank(sheet);
    for (const auto& [system, mar] : report.average) CHECK(mar == doctest::Approx(1.0));
  }

  SUBCASE("ranks 1,2,3 over three items average to 2") {
    RankingSheet sheet;
    sheet.criterion = "Coverage";
    sheet.annotators = {"a0"};
    sheet.items = {"i0", "i1", "i2"};
    sheet.systems = {"sys"};
    sheet.ranks = {{{1}, {2}, {3}}};
    MarReport report = mean_average_rank(sheet);
    CHECK(report.average.at("sys") == doctest::Approx(2.0));
  }

  SUBCASE("the overall MAR is the mean of per-annotator MARs") {
    RankingSheet sheet;
    sheet.criterion = "Soundness";
    sheet.annotators = {"a0", "a1", "a2"};
    sheet.items = {"i0", "i1"};
    sheet.systems = {"sys"};
    sheet.ranks = {{{1}, {1}}, {{2}, {2}}, {{3}, {1}}};
    MarReport report = mean_average_rank(sheet);
    CHECK(report.per_annotator.at("sys").at("a0") == doctest::Approx(1.0));
    CHECK(report.per_annotator.at("sys").at("a1") == doctest::Approx(2.0));
    CHECK(report.per_annotator.at("sys").at("a2") == doctest::Approx(2.0));
    CHECK(report.average.at("sys") == doctest::Approx((1.0 + 2.0 + 2.0) / 3.0));
  }

  SUBCASE("MAR stays within [1, #systems] on random sheets") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> rank(1, 3);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::vector<int>> units;
      for (int u = 0; u < 12; ++u)
        units.push_back({rank(rng), rank(rng), rank(rng)});
      RankingSheet sheet = test::sheet_from_units(units, 3, 3);
      MarReport report = mean_average_rank(sheet);
      for (const auto& [system, mar] : report.average) {
        CHECK(mar >= 1.0);
        CHECK(mar <= 3.0);
      }
    }
  }
}

TEST_CASE("krippendorff alpha: frozen small cases") {
  SUBCASE("identical rankings give exactly 1.0") {
    // every annotator ranks sys0=1, sys1=2, sys2=3 on every item
    std::vector<std::vector<int>> units;
    for (int item = 0; item < 4; ++item)
      for (int rank = 1; rank <= 3; ++rank) units.push_back({rank, rank, rank});
    RankingSheet sheet = test::sheet_from_units(units, 3, 3);
    AlphaResult a = krippendorff_alpha(sheet, AlphaMetric::Ordinal);
    CHECK(a.value == 1.0);
    CHECK(!a.degenerate);
  }

  SUBCASE("two annotators with opposite orders on two items score -0.75") {
    // Hand-derived coincidence matrix: every unit rated {1,2} by the pair,
    // so o(1,2)=o(2,1)=4, n1=n2=4, n=8; both metrics reduce to
    // alpha = 1 - 7*4/16 = -0.75.
    std::vector<std::vector<int>> units = {{1, 2}, {2, 1}, {1, 2}, {2, 1}};
    RankingSheet sheet = test::sheet_from_units(units, 2, 2);
    AlphaResult ordinal = krippendorff_alpha(sheet, AlphaMetric::Ordinal);
    AlphaResult interval = krippendorff_alpha(sheet, AlphaMetric::Interval);
    CHECK(ordinal.value == doctest::Approx(-0.75).epsilon(1e-9));
    CHECK(interval.value == doctest::Approx(-0.75).epsilon(1e-9));
    CHECK(test::oracle_alpha(units, AlphaMetric::Ordinal) == doctest::Approx(-0.75).epsilon(1e-12));
  }

  SUBCASE("all-identical cells are degenerate and score 1.0 by convention") {
    std::vector<std::vector<int>> units(8, std::vector<int>{2, 2});
    RankingSheet sheet = test::sheet_from_units(units, 2, 2);
    AlphaResult a = krippendorff_alpha(sheet, AlphaMetric::Ordinal);
    CHECK(a.value == 1.0);
    CHECK(a.degenerate);
    CHECK(!a.note.empty());
  }

  SUBCASE("too few annotators or items is an error") {
    std::vector<std::vector<int>> units = {{1}, {2}, {1}, {2}};
    CHECK_THROWS_AS(krippendorff_alpha(test::sheet_from_units(units, 1, 2), AlphaMetric::Ordinal),
                    DegenerateData);
  }
}

TEST_CASE("krippendorff alpha agrees with the pair-enumeration oracle on random sheets") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> rank(1, 3);
  std::uniform_int_distribution<int> annotators(2, 4);
  std::uniform_int_distribution<int> items(2, 6);
  for (int trial = 0; trial < 50; ++trial) {
    int a = annotators(rng), i = items(rng), s = 3;
    std::vector<std::vector<int>> units;
    for (int u = 0; u < i * s; ++u) {
      std::vector<int> ratings;
      for (int r = 0; r < a; ++r) ratings.push_back(rank(rng));
      units.push_back(std::move(ratings));
    }
    RankingSheet sheet = test::sheet_from_units(units, a, s);
    for (AlphaMetric metric : {AlphaMetric::Ordinal, AlphaMetric::Interval}) {
      AlphaResult got = krippendorff_alpha(sheet, metric);
      double want = test::oracle_alpha(units, metric);
      CHECK(got.value == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("krippendorff alpha tends to zero on large random sheets") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> rank(1, 3);
  std::vector<std::vector<int>> units;
  for (int u = 0; u < 10000; ++u) units.push_back({rank(rng), rank(rng), rank(rng)});
  RankingSheet sheet = test::sheet_from_units(units, 3, 2);
  CHECK(std::abs(krippendorff_alpha(sheet, AlphaMetric::Ordinal).value) <= 0.1);
  CHECK(std::abs(krippendorff_alpha(sheet, AlphaMetric::Interval).value) <= 0.1);
}

TEST_CASE("duplicating an annotator adds agreement mass on the disagreement fixture") {
  std::vector<std::vector<int>> units = {{1, 2, 2}, {2, 1, 3}, {3, 3, 1},
                                         {1, 2, 1}, {2, 3, 3}, {1, 1, 2}};
  RankingSheet sheet = test::sheet_from_units(units, 3, 2);
  std::vector<std::vector<int>> dup_units;
  for (const auto& u : units) {
    std::vector<int> v = u;
    v.push_back(u[0]);
    dup_units.push_back(std::move(v));
  }
  RankingSheet dup = test::sheet_from_units(dup_units, 4, 2);
  CHECK(krippendorff_alpha(dup, AlphaMetric::Ordinal).value >=
        krippendorff_alpha(sheet, AlphaMetric::Ordinal).value);
}

TEST_CASE("ranking csv loads per criterion and validates completeness") {
  test::TempDir dir;
  SUBCASE("well-formed sheet") {
    std::string csv = "annotator,item,criterion,system,rank\n";
    for (const char* a : {"a1", "a2"})
      for (const char* i : {"i1", "i2"})
        for (const char* s : {"cot", "folk"})
          csv += std::string(a) + "," + i + ",Coverage," + s + ",1\n";
    csv += "a1,i1,Soundness,cot,2\na1,i1,Soundness,folk,1\n";
    test::write_file(dir.file("r.csv"), csv);
    std::vector<RankingSheet> sheets = load_ranking_csv(dir.file("r.csv"));
    REQUIRE(sheets.size() == 2);
    CHECK(sheets[0].criterion == "Coverage");
    CHECK(sheets[0].annotators.size() == 2);
    CHECK(sheets[1].criterion == "Soundness");
  }

  SUBCASE("missing cells are rejected") {
    test::write_file(dir.file("bad.csv"),
                     "annotator,item,criterion,system,rank\n"
                     "a1,i1,Coverage,cot,1\n"
                     "a1,i1,Coverage,folk,2\n"
                     "a2,i1,Coverage,cot,1\n");  // a2/folk missing
    CHECK_THROWS_AS(load_ranking_csv(dir.file("bad.csv")), FormatError);
  }

  SUBCASE("duplicate cells are rejected") {
    test::write_file(dir.file("dup.csv"),
                     "annotator,item,criterion,system,rank\n"
                     "a1,i1,Coverage,cot,1\n"
                     "a1,i1,Coverage,cot,2\n");
    CHECK_THROWS_AS(load_ranking_csv(dir.file("dup.csv")), FormatError);
  }

  SUBCASE("a wrong header is rejected") {
    test::write_file(dir.file("h.csv"), "a,b,c\n");
    CHECK_THROWS_AS(load_ranking_csv(dir.file("h.csv")), FormatError);
  }
}

TEST_CASE("scoring traces groups by challenge and counts unknowns as wrong") {
  TraceFile file;
  file.manifest.strategy = "folk";
  auto add = [&](const std::string& id, Challenge ch, Label gold, Label pred) {
    VerdictTrace t;
    t.claim.id = id;
    t.claim.text = "x";
    t.claim.gold_label = gold;
    t.claim.challenge = ch;
    t.final_label = pred;
    file.traces.push_back(std::move(t));
  };
  using L = Label;
  add("1", Challenge::TwoHop, L::Supported, L::Supported);
  add("2", Challenge::TwoHop, L::NotSupported, L::NotSupported);
  add("3", Challenge::ThreeHop, L::Supported, L::Unknown);   // wrong
  add("4", Challenge::ThreeHop, L::NotSupported, L::Supported);  // wrong
  VerdictTrace unlabeled;
  unlabeled.claim.id = "5";
  unlabeled.claim.text = "x";
  file.traces.push_back(unlabeled);

  EvalReport report = score_traces(file);
  CHECK(report.scored == 4);
  CHECK(report.skipped_unlabeled == 1);
  CHECK(report.unknown_count == 1);
  CHECK(report.per_challenge_macro_f1.at("2hop") == doctest::Approx(1.0));
  CHECK(report.per_challenge_macro_f1.at("3hop") == doctest::Approx(0.0));
  CHECK(report.per_challenge_macro_f1.count("overall") == 1);
  std::string table = report.render_table();
  CHECK(table.find("2hop") != std::string::npos);
  CHECK(table.find("100.00") != std::string::npos);
  CHECK(report.to_json().contains("macro_f1"));
}

TEST_CASE("external predictions score against gold claims by id") {
  std::vector<Claim> gold = label_pool(2, 2);
  std::vector<std::pair<std::string, Label>> preds{
      {"p0", Label::Supported},
      {"p1", Label::Supported},
      {"p2", Label::NotSupported},
      // p3 missing -> scored as Unknown
      {"p9", Label::Supported},  // unmatched
  };
  std::vector<std::string> diagnostics;
  EvalReport report = score_predictions(preds, gold, &diagnostics);
  CHECK(report.scored == 4);
  CHECK(report.unknown_count == 1);
  CHECK(diagnostics.size() == 2);
}
