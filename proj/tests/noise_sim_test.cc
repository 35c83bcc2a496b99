#include "dsre/noise_sim.h"

#include <gtest/gtest.h>

#include "dsre/errors.h"
#include "json.hpp"
#include "oracles.h"
#include "test_util.h"

namespace dsre {
namespace {

using testing::MakeSentence;

// Pair P<i> is mentioned together by `count` sentences; each sentence
// yields a positive (first -> second) and a negative (second -> first).
struct Labeled {
  Corpus corpus;
  AnnotationSet gold{Source::kGold};
};

Labeled FnExample() {
  Labeled s;
  int sid = 0;
  auto add = [&](const std::string &a, const std::string &b,
                 const std::string &forward) {
    std::string id = "s" + std::to_string(sid++);
    s.corpus.AddSentence(MakeSentence(id, a + " met " + b,
                                      {{0, 1, "PERSON"}, {2, 3, "PERSON"}}));
    s.gold.Add({id, {0, 1}, {2, 3}, 0}, forward);
    s.gold.Add({id, {2, 3}, {0, 1}, 0}, "NA");
  };
  for (const auto &[pair, count] :
       std::vector<std::pair<std::string, int>>{{"A", 1}, {"B", 2}, {"C", 10}}) {
    for (int i = 0; i < count; ++i) add(pair + "1", pair + "2", "friend");
  }
  for (int i = 0; i < 37; ++i) {
    add("N" + std::to_string(i), "M" + std::to_string(i), "NA");
  }
  return s;
}

TEST(InjectFalseNegativesTest, ThresholdExample) {
  Labeled s = FnExample();
  ASSERT_EQ(s.gold.size(), 100u);
  FnInjection out = InjectFalseNegatives(s.gold, s.corpus, 0.05);
  EXPECT_EQ(out.threshold, 3);
  EXPECT_EQ(out.relabeled, 3);
  EXPECT_DOUBLE_EQ(out.fn_rate, 3.0 / 90.0);
  EXPECT_EQ(out.annotations.source(), Source::kSimulated);
  EXPECT_EQ(*out.annotations.Find({"s0", {0, 1}, {2, 3}, 0}), "NA");
  EXPECT_EQ(*out.annotations.Find({"s2", {0, 1}, {2, 3}, 0}), "NA");
  EXPECT_EQ(*out.annotations.Find({"s3", {0, 1}, {2, 3}, 0}), "friend");

  NoiseReport r = NoiseStats(out.annotations, s.gold);
  EXPECT_EQ(r.fn, 3);
  EXPECT_EQ(r.tn, 87);
  EXPECT_EQ(r.tp, 10);
  EXPECT_EQ(r.fp, 0);
}

TEST(InjectFalseNegativesTest, ZeroTargetKeepsGold) {
  Labeled s = FnExample();
  FnInjection out = InjectFalseNegatives(s.gold, s.corpus, 0.0);
  EXPECT_EQ(out.threshold, 1);
  EXPECT_EQ(out.relabeled, 0);
  for (const auto &e : s.gold.entries()) {
    EXPECT_EQ(*out.annotations.Find(e.key), e.label);
  }
}

TEST(InjectFalseNegativesTest, MatchesExhaustiveSearch) {
  Labeled s = FnExample();
  for (double target : {0.0, 0.01, 0.02, 0.05, 0.1, 0.5, 1.0}) {
    FnInjection out = InjectFalseNegatives(s.gold, s.corpus, target);
    auto best = oracle::BestFnThreshold(s.gold, s.corpus, target);
    EXPECT_EQ(out.threshold, best.threshold) << target;
    EXPECT_EQ(out.relabeled, best.relabeled) << target;
    EXPECT_DOUBLE_EQ(out.fn_rate, best.rate) << target;
  }
}

TEST(InjectFalseNegativesTest, Errors) {
  Labeled s = FnExample();
  AnnotationSet negatives(Source::kGold);
  negatives.Add({"s0", {0, 1}, {2, 3}, 0}, "NA");
  EXPECT_THROW(InjectFalseNegatives(negatives, s.corpus), Error);
  EXPECT_THROW(InjectFalseNegatives(s.gold, s.corpus, 1.5), ConfigError);
  AnnotationSet stray(Source::kGold);
  stray.Add({"zz", {0, 1}, {2, 3}, 0}, "friend");
  EXPECT_THROW(InjectFalseNegatives(stray, s.corpus), UniverseMismatchError);
}

TEST(PairMentionCountsTest, Unordered) {
  Labeled s = FnExample();
  auto counts = PairMentionCounts(s.corpus);
  EXPECT_EQ(counts.at({"A1", "A2"}), 1);
  EXPECT_EQ(counts.at({"C1", "C2"}), 10);
  EXPECT_FALSE(counts.count({"C2", "C1"}));
}

TEST(InjectFalsePositivesTest, RelabelsMatchingPairs) {
  Corpus corpus;
  corpus.AddSentence(MakeSentence("a", "Jobs founded Apple",
                                  {{0, 1, "PERSON"}, {2, 3, "ORGANIZATION"}}));
  corpus.AddSentence(MakeSentence("b", "Jobs left Apple",
                                  {{0, 1, "PERSON"}, {2, 3, "ORGANIZATION"}}));
  corpus.AddSentence(MakeSentence("c", "Apple hired Jobs",
                                  {{0, 1, "ORGANIZATION"}, {2, 3, "PERSON"}}));
  AnnotationSet gold(Source::kGold);
  gold.Add({"a", {0, 1}, {2, 3}, 0}, "founder_of");
  gold.Add({"a", {0, 1}, {2, 3}, 1}, "employee_of");
  gold.Add({"a", {2, 3}, {0, 1}, 0}, "NA");
  gold.Add({"b", {0, 1}, {2, 3}, 0}, "NA");
  gold.Add({"b", {2, 3}, {0, 1}, 0}, "NA");
  gold.Add({"c", {0, 1}, {2, 3}, 0}, "NA");
  gold.Add({"c", {2, 3}, {0, 1}, 0}, "NA");

  AnnotationSet out = InjectFalsePositives(gold, corpus);
  EXPECT_EQ(out.LabelsOf({"b", {0, 1}, {2, 3}, 0}),
            (std::vector<std::string>{"founder_of", "employee_of"}));
  EXPECT_EQ(out.LabelsOf({"c", {2, 3}, {0, 1}, 0}),
            (std::vector<std::string>{"founder_of", "employee_of"}));
  EXPECT_EQ(out.LabelsOf({"a", {2, 3}, {0, 1}, 0}),
            std::vector<std::string>{"NA"});
  EXPECT_EQ(out.LabelsOf({"c", {0, 1}, {2, 3}, 0}),
            std::vector<std::string>{"NA"});

  NoiseReport r = NoiseStats(out, gold);
  EXPECT_EQ(r.tp, 2);
  EXPECT_EQ(r.fp, 4);
  EXPECT_EQ(r.tn, 3);
  EXPECT_EQ(r.fn, 0);
}

TEST(InjectFalsePositivesTest, NoRepeatedPairIsNoOp) {
  Labeled s = FnExample();
  AnnotationSet gold(Source::kGold);
  gold.Add({"s0", {0, 1}, {2, 3}, 0}, "friend");
  gold.Add({"s0", {2, 3}, {0, 1}, 0}, "NA");
  AnnotationSet out = InjectFalsePositives(gold, s.corpus);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(*out.Find({"s0", {2, 3}, {0, 1}, 0}), "NA");
}

TEST(InjectFalsePositivesTest, Idempotent) {
  Labeled s = FnExample();
  FnInjection fn = InjectFalseNegatives(s.gold, s.corpus, 0.05);
  AnnotationSet once = InjectFalsePositives(fn.annotations, s.corpus);
  AnnotationSet twice = InjectFalsePositives(once, s.corpus);
  ASSERT_EQ(once.size(), twice.size());
  for (size_t i = 0; i < once.size(); ++i) {
    EXPECT_EQ(once.entries()[i].key, twice.entries()[i].key);
    EXPECT_EQ(once.entries()[i].label, twice.entries()[i].label);
  }
}

struct TableRow {
  const char *name;
  int64_t tp, fp, tn, fn;
  const char *fp_pct, *fn_pct;
};

// Reference counts for simulated, IPIN and NPIN training sets.
constexpr TableRow kReference[] = {
    {"simulated DS", 10256, 9838, 49090, 2756, "48.96", "5.32"},
    {"IPIN", 4895, 898, 47519, 1499, "15.50", "3.06"},
    {"NPIN", 6419, 3331, 47519, 1499, "34.16", "3.06"},
};

TEST(NoiseReportTest, ReferenceRates) {
  for (const auto &row : kReference) {
    NoiseReport r = NoiseReport::FromCounts(row.tp, row.fp, row.tn, row.fn);
    EXPECT_NEAR(100 * r.fp_rate(), std::stod(row.fp_pct), 0.005) << row.name;
    EXPECT_NEAR(100 * r.fn_rate(), std::stod(row.fn_pct), 0.005) << row.name;
  }
  EXPECT_NEAR(NoiseReport::FromCounts(10256, 9838, 49090, 2756).fp_rate(),
              9838.0 / 20094.0, 1e-15);
}

TEST(NoiseReportTest, EdgeCases) {
  NoiseReport zero;
  EXPECT_EQ(zero.fp_rate(), 0);
  EXPECT_EQ(zero.fn_rate(), 0);
  EXPECT_THROW(NoiseReport::FromCounts(-1, 0, 0, 0), Error);
  auto j = nlohmann::json::parse(NoiseReport::FromCounts(1, 1, 3, 1).ToJson());
  EXPECT_EQ(j["fp_rate"], 0.5);
  EXPECT_EQ(j["fn_rate"], 0.25);
}

TEST(NoiseTableTest, Layout) {
  std::vector<std::pair<std::string, NoiseReport>> rows;
  for (const auto &row : kReference) {
    rows.emplace_back(row.name,
                      NoiseReport::FromCounts(row.tp, row.fp, row.tn, row.fn));
  }
  std::string table = NoiseTable(rows);
  EXPECT_NE(table.find("9838 (48.96%)"), std::string::npos);
  EXPECT_NE(table.find("2756 (5.32%)"), std::string::npos);
  EXPECT_NE(table.find("3331 (34.16%)"), std::string::npos);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
  EXPECT_EQ(table.rfind("Training data", 0), 0u);
}

TEST(NoiseStatsTest, Errors) {
  AnnotationSet gold(Source::kGold);
  gold.Add({"a", {0, 1}, {2, 3}, 0}, "NA");
  AnnotationSet ann(Source::kDS);
  ann.Add({"b", {0, 1}, {2, 3}, 0}, "NA");
  EXPECT_THROW(NoiseStats(ann, gold), UniverseMismatchError);
}

}  // namespace
}  // namespace dsre
