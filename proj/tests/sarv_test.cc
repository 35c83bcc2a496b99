#include "dsre/sarv.h"

#include <gtest/gtest.h>

#include "dsre/errors.h"
#include "test_util.h"

namespace dsre {
namespace {

using testing::MakeSentence;
using testing::TempDir;

constexpr double kTau = 0.95;

PatternSet Initial(const std::vector<std::pair<std::string, int64_t>> &items,
                   const std::string &relation = "founders") {
  PatternSet set;
  set.relation = relation;
  for (const auto &[text, f] : items) {
    set.patterns.push_back(Pattern::FromText(text, f));
  }
  return set;
}

std::vector<std::pair<std::string, int64_t>> Summary(const PatternSet &set) {
  std::vector<std::pair<std::string, int64_t>> out;
  for (const auto &p : set.patterns) out.emplace_back(p.Text(), p.frequency);
  return out;
}

TEST(MinePatternsTest, ObjectBeforeSubject) {
  Corpus corpus;
  corpus.AddSentence(MakeSentence("s", "Akio Morita , a co-founder of Sony",
                                  {{0, 2, "PERSON"}, {6, 7, "ORGANIZATION"}}));
  AnnotationSet ds(Source::kDS);
  ds.Add({"s", {6, 7}, {0, 2}, 0}, "founders");
  ds.Add({"s", {0, 2}, {6, 7}, 0}, "NA");
  PatternSet set = MinePatterns(ds, corpus, "founders");
  ASSERT_EQ(set.patterns.size(), 1u);
  EXPECT_EQ(set.patterns[0].Text(), "{obj} , a co-founder of {subj}");
  EXPECT_EQ(set.patterns[0].frequency, 1);
  EXPECT_EQ(set.patterns[0].examples,
            std::vector<std::string>{"s:6-7:0-2"});
  EXPECT_EQ(set.stage, PatternStage::kInitial);
}

TEST(MinePatternsTest, IdenticalBetweenTextMerges) {
  Corpus corpus;
  corpus.AddSentence(MakeSentence("a", "Sony founder Akio Morita",
                                  {{0, 1, "ORGANIZATION"}, {2, 4, "PERSON"}}));
  corpus.AddSentence(MakeSentence("b", "Acme founder Wile",
                                  {{0, 1, "ORGANIZATION"}, {2, 3, "PERSON"}}));
  corpus.AddSentence(MakeSentence("c", "Acme Wile",
                                  {{0, 1, "ORGANIZATION"}, {1, 2, "PERSON"}}));
  AnnotationSet ds(Source::kDS);
  ds.Add({"a", {0, 1}, {2, 4}, 0}, "founders");
  ds.Add({"b", {0, 1}, {2, 3}, 0}, "founders");
  ds.Add({"c", {0, 1}, {1, 2}, 0}, "founders");
  PatternSet set = MinePatterns(ds, corpus, "founders");
  EXPECT_EQ(Summary(set), (std::vector<std::pair<std::string, int64_t>>{
                              {"{subj} founder {obj}", 2}, {"{subj} {obj}", 1}}));
  EXPECT_TRUE(MinePatterns(ds, corpus, "company").patterns.empty());
}

TEST(MinePatternsTest, ExampleCap) {
  Corpus corpus;
  AnnotationSet ds(Source::kDS);
  for (int i = 0; i < 5; ++i) {
    std::string id = "s" + std::to_string(i);
    corpus.AddSentence(MakeSentence(id, "A founder B",
                                    {{0, 1, "ORGANIZATION"}, {2, 3, "PERSON"}}));
    ds.Add({id, {0, 1}, {2, 3}, 0}, "founders");
  }
  PatternSet set = MinePatterns(ds, corpus, "founders", 2);
  ASSERT_EQ(set.patterns.size(), 1u);
  EXPECT_EQ(set.patterns[0].frequency, 5);
  EXPECT_EQ(set.patterns[0].examples.size(), 2u);
}

TEST(FilterPatternsTest, FractionCut) {
  std::vector<std::pair<std::string, int64_t>> items;
  for (int i = 0; i < 100; ++i) {
    items.emplace_back("{subj} w" + std::to_string(i) + " {obj}", 1000 - i);
  }
  SarvConfig config;
  PatternSet out = FilterPatterns(Initial(items), config);
  ASSERT_EQ(out.patterns.size(), 10u);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(out.patterns[i].frequency, 1000 - i);
  }
}

TEST(FilterPatternsTest, StopWordOnlyAndLongPatternsDropped) {
  SarvConfig config;
  config.top_fraction = 1.0;
  PatternSet out = FilterPatterns(
      Initial({{"{subj} of the {obj}", 50},
               {"{subj} founder {obj}", 40},
               {"{subj} a b c d e f g h i founder {obj}", 30},
               {"{subj} a b c d e f g h founder {obj}", 20},
               {"{subj} , {obj}", 10}}),
      config);
  EXPECT_EQ(Summary(out),
            (std::vector<std::pair<std::string, int64_t>>{
                {"{subj} founder {obj}", 40},
                {"{subj} a b c d e f g h founder {obj}", 20}}));
}

TEST(FilterPatternsTest, CandidateCap) {
  std::vector<std::pair<std::string, int64_t>> items;
  for (int i = 0; i < 60; ++i) {
    items.emplace_back("{subj} w" + std::to_string(i) + " {obj}", 100 + i);
  }
  SarvConfig config;
  config.top_fraction = 1.0;
  PatternSet out = FilterPatterns(Initial(items), config);
  ASSERT_EQ(out.patterns.size(), 50u);
  EXPECT_EQ(out.patterns.front().frequency, 159);
  EXPECT_EQ(out.patterns.back().frequency, 110);
}

TEST(FilterPatternsTest, RequiresInitialStage) {
  PatternSet set = Initial({{"{subj} x {obj}", 1}});
  set.stage = PatternStage::kGrouped;
  EXPECT_THROW(FilterPatterns(set, SarvConfig{}), Error);
}

TEST(SarvConfigTest, Defaults) {
  SarvConfig c;
  EXPECT_EQ(c.top_fraction, 0.10);
  EXPECT_EQ(c.max_pattern_tokens, 10);
  EXPECT_EQ(c.max_candidates_per_relation, 50);
  EXPECT_EQ(c.min_screening_frequency, 10);
  c.top_fraction = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c.top_fraction = 1.5;
  EXPECT_THROW(c.Validate(), ConfigError);
}

TEST(IsDuplicateTest, MockTraces) {
  MockNliEngine mock;
  Pattern founder = Pattern::FromText("{subj} founder {obj}");
  EXPECT_TRUE(IsDuplicate(founder, founder, mock, kTau));
  EXPECT_TRUE(IsDuplicate(Pattern::FromText("{subj} , founder of {obj}"),
                          founder, mock, kTau));
  EXPECT_FALSE(IsDuplicate(Pattern::FromText("{subj} chief executive {obj}"),
                           founder, mock, kTau));
  EXPECT_THROW(IsDuplicate(founder,
                           Pattern::FromText("{subj} , founder of {obj}"),
                           mock, kTau),
               Error);
}

TEST(GroupPatternsTest, HandTrace) {
  MockNliEngine mock;
  PatternSet grouped = GroupPatterns(
      Initial({{"{subj} founder {obj}", 5},
               {"{subj} , founder of {obj}", 4},
               {"{subj} chief executive {obj}", 3}}),
      mock, kTau);
  EXPECT_EQ(grouped.stage, PatternStage::kGrouped);
  EXPECT_EQ(Summary(grouped), (std::vector<std::pair<std::string, int64_t>>{
                                  {"{subj} founder {obj}", 9},
                                  {"{subj} chief executive {obj}", 3}}));
  ASSERT_EQ(grouped.patterns[0].members.size(), 2u);
  EXPECT_EQ(grouped.patterns[0].members[0].text, "{subj} founder {obj}");
  EXPECT_EQ(grouped.patterns[0].members[1].text, "{subj} , founder of {obj}");
  EXPECT_EQ(grouped.patterns[0].members[1].frequency, 4);
}

TEST(GroupPatternsTest, SinglePatternUnchanged) {
  PatternSet grouped =
      GroupPatterns(Initial({{"{subj} founder {obj}", 5}}), MockNliEngine(), kTau);
  EXPECT_EQ(Summary(grouped), (std::vector<std::pair<std::string, int64_t>>{
                                  {"{subj} founder {obj}", 5}}));
}

TEST(GroupPatternsTest, AbsorbedPatternsNeverLead) {
  // Both longer alpha ... beta patterns join the shortest one.
  MockNliEngine mock;
  PatternSet grouped = GroupPatterns(
      Initial({{"{subj} alpha beta {obj}", 2},
               {"{subj} alpha gamma beta {obj}", 3},
               {"{subj} alpha gamma delta beta {obj}", 4},
               {"{subj} zeta {obj}", 1}}),
      mock, kTau);
  EXPECT_EQ(Summary(grouped), (std::vector<std::pair<std::string, int64_t>>{
                                  {"{subj} alpha beta {obj}", 9},
                                  {"{subj} zeta {obj}", 1}}));
}

TEST(GroupPatternsTest, EqualLengthTiesByFrequencyThenText) {
  // Each of these entails the others only when identical, so every pattern
  // survives; ranking is by frequency, then length, then text.
  PatternSet grouped = GroupPatterns(
      Initial({{"{subj} bb {obj}", 3}, {"{subj} aa {obj}", 3},
               {"{subj} cc {obj}", 7}}),
      MockNliEngine(), kTau);
  EXPECT_EQ(Summary(grouped), (std::vector<std::pair<std::string, int64_t>>{
                                  {"{subj} cc {obj}", 7},
                                  {"{subj} aa {obj}", 3},
                                  {"{subj} bb {obj}", 3}}));
}

TEST(PruneTest, MockTraces) {
  MockNliEngine mock;
  Template general{"{subj} was founded by {obj}"};
  PatternSet grouped = Initial({{"{subj} founded by {obj}", 8},
                                {"{subj} co-founder {obj}", 5}});
  grouped.stage = PatternStage::kGrouped;
  PatternSet pruned = PruneByGeneralTemplate(grouped, general, mock, kTau);
  EXPECT_EQ(pruned.stage, PatternStage::kPruned);
  EXPECT_EQ(Summary(pruned), (std::vector<std::pair<std::string, int64_t>>{
                                 {"{subj} co-founder {obj}", 5}}));
  PatternSet empty;
  empty.stage = PatternStage::kGrouped;
  EXPECT_TRUE(PruneByGeneralTemplate(empty, general, mock, kTau).patterns.empty());
  EXPECT_THROW(PruneByGeneralTemplate(Initial({}), general, mock, kTau), Error);
}

TEST(PatternFillersTest, ByType) {
  RelationSchema schema = RelationSchema::Load(testing::Fixture("schema.json"));
  PatternFillers f = PatternFillers::ForRelation(schema, "founders");
  EXPECT_EQ(f.subj, "the company");
  EXPECT_EQ(f.obj, "John Smith");
  EXPECT_EQ(PatternFillers::ForType("CITY", true), "X");
  EXPECT_EQ(PatternFillers::ForType("CITY", false), "Y");
  EXPECT_EQ(PatternFillers::ForType("LOCATION", false), "the city");
  EXPECT_EQ(Instantiate(Pattern::FromText("{obj} , founder of {subj}"), f),
            "John Smith , founder of the company");
}

TEST(PatternSetIoTest, RoundTrip) {
  TempDir dir;
  PatternSet grouped =
      GroupPatterns(Initial({{"{subj} founder {obj}", 5},
                             {"{subj} , founder of {obj}", 4}}),
                    MockNliEngine(), kTau);
  grouped.patterns[0].examples = {"s:0-1:2-3"};
  PatternSet other = Initial({{"{subj} born in {obj}", 2}}, "place_of_birth");
  SavePatternSets(dir.Path("p.jsonl"), {grouped, other});
  auto loaded = LoadPatternSets(dir.Path("p.jsonl"));
  ASSERT_EQ(loaded.size(), 2u);
  const PatternSet &g = loaded.at("founders");
  EXPECT_EQ(g.stage, PatternStage::kGrouped);
  EXPECT_EQ(Summary(g), Summary(grouped));
  EXPECT_EQ(g.patterns[0].examples, grouped.patterns[0].examples);
  EXPECT_EQ(g.patterns[0].members.size(), 2u);
  EXPECT_EQ(loaded.at("place_of_birth").stage, PatternStage::kInitial);
}

}  // namespace
}  // namespace dsre
