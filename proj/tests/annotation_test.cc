#include "dsre/annotation.h"

#include <gtest/gtest.h>

#include "dsre/errors.h"
#include "test_util.h"

namespace dsre {
namespace {

using testing::MakeSentence;
using testing::TempDir;
using testing::WriteFile;

const std::vector<std::string> kRelations = {"founders", "company"};

Corpus SonyCorpus() {
  Corpus corpus;
  corpus.AddSentence(MakeSentence(
      "s1", "Sony was founded by Akio Morita",
      {{0, 1, "ORGANIZATION"}, {4, 6, "PERSON"}}));
  corpus.AddSentence(MakeSentence(
      "s2", "Akio Morita criticized Sony yesterday",
      {{0, 2, "PERSON"}, {3, 4, "ORGANIZATION"}}));
  corpus.AddSentence(MakeSentence(
      "s3", "Sony hired Ken Kutaragi",
      {{0, 1, "ORGANIZATION"}, {2, 4, "PERSON"}}));
  return corpus;
}

TEST(DistantAnnotateTest, LabelsEverySentenceMentioningThePair) {
  Corpus corpus = SonyCorpus();
  KnowledgeBase kb;
  kb.Add("Sony", "founders", "Akio Morita");
  AnnotationSet ds = DistantAnnotate(corpus, kb, kRelations);
  EXPECT_EQ(ds.source(), Source::kDS);
  EXPECT_EQ(ds.size(), corpus.instances().size());
  // s2 does not express the relation but is labeled anyway.
  EXPECT_EQ(*ds.Find({"s1", {0, 1}, {4, 6}, 0}), "founders");
  EXPECT_EQ(*ds.Find({"s2", {3, 4}, {0, 2}, 0}), "founders");
  EXPECT_EQ(*ds.Find({"s1", {4, 6}, {0, 1}, 0}), "NA");
}

TEST(DistantAnnotateTest, PairMissingFromKbIsNa) {
  Corpus corpus = SonyCorpus();
  KnowledgeBase kb;
  kb.Add("Sony", "founders", "Akio Morita");
  AnnotationSet ds = DistantAnnotate(corpus, kb, kRelations);
  EXPECT_EQ(*ds.Find({"s3", {2, 4}, {0, 1}, 0}), "NA");
}

TEST(DistantAnnotateTest, EmptyKbGivesAllNa) {
  Corpus corpus = SonyCorpus();
  AnnotationSet ds = DistantAnnotate(corpus, KnowledgeBase(), kRelations);
  EXPECT_EQ(ds.size(), corpus.instances().size());
  for (const auto &e : ds.entries()) EXPECT_EQ(e.label, "NA");
}

TEST(DistantAnnotateTest, UnknownRelationIsConfigError) {
  KnowledgeBase kb;
  kb.Add("Sony", "spouse", "Akio Morita");
  EXPECT_THROW(DistantAnnotate(SonyCorpus(), kb, kRelations), ConfigError);
}

TEST(DistantAnnotateTest, MultiRelationPairGetsOneSlotPerRelation) {
  KnowledgeBase kb;
  kb.Add("Sony", "company", "Akio Morita");
  kb.Add("Sony", "founders", "Akio Morita");
  AnnotationSet ds = DistantAnnotate(SonyCorpus(), kb, kRelations);
  InstanceKey base{"s1", {0, 1}, {4, 6}, 0};
  EXPECT_EQ(ds.LabelsOf(base),
            (std::vector<std::string>{"founders", "company"}));
  InstanceKey second = base;
  second.slot = 1;
  EXPECT_EQ(*ds.Find(second), "company");
  EXPECT_EQ(ds.size(), SonyCorpus().instances().size() + 2);
}

TEST(DistantAnnotateTest, CaseFoldingIsOptIn) {
  KnowledgeBase kb;
  kb.Add("SONY", "founders", "akio morita");
  EXPECT_EQ(*DistantAnnotate(SonyCorpus(), kb, kRelations)
                 .Find({"s1", {0, 1}, {4, 6}, 0}),
            "NA");
  EXPECT_EQ(*DistantAnnotate(SonyCorpus(), kb, kRelations, {false})
                 .Find({"s1", {0, 1}, {4, 6}, 0}),
            "founders");
}

TEST(DistantAnnotateTest, MatchesBruteForceScanAndIsDeterministic) {
  Corpus corpus = Corpus::Load(testing::Fixture("train.jsonl"));
  KnowledgeBase kb = KnowledgeBase::Load(testing::Fixture("kb.tsv"));
  std::vector<std::string> rels = {"founders", "place_of_birth", "company",
                                   "contains"};
  AnnotationSet ds = DistantAnnotate(corpus, kb, rels);
  AnnotationSet again = DistantAnnotate(corpus, kb, rels);
  ASSERT_EQ(ds.size(), again.size());
  for (const auto &inst : corpus.instances()) {
    std::vector<std::string> expected;
    for (const auto &r : rels) {
      for (const auto &t : kb.triples()) {
        if (t.subj == inst.subj.surface && t.obj == inst.obj.surface &&
            t.relation == r) {
          expected.push_back(r);
        }
      }
    }
    if (expected.empty()) expected.push_back("NA");
    EXPECT_EQ(ds.LabelsOf(inst.key()), expected) << inst.key().ToString();
    EXPECT_EQ(again.LabelsOf(inst.key()), expected);
  }
}

TEST(AnnotationSetTest, RejectsDoubleLabel) {
  AnnotationSet set(Source::kGold);
  set.Add({"s", {0, 1}, {2, 3}, 0}, "founders");
  EXPECT_THROW(set.Add({"s", {0, 1}, {2, 3}, 0}, "NA"), Error);
  EXPECT_THROW(set.Add({"s", {0, 1}, {2, 4}, 0}, ""), Error);
}

TEST(AnnotationSetTest, SaveLoadRoundTrip) {
  TempDir dir;
  AnnotationSet set(Source::kIPIN);
  set.Add({"s", {0, 1}, {2, 3}, 0}, "founders");
  set.Add({"s", {0, 1}, {2, 3}, 1}, "company");
  set.Add({"t", {2, 3}, {0, 1}, 0}, "NA");
  set.Save(dir.Path("a.jsonl"));
  AnnotationSet loaded = AnnotationSet::Load(dir.Path("a.jsonl"));
  EXPECT_EQ(loaded.source(), Source::kIPIN);
  ASSERT_EQ(loaded.size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(loaded.entries()[i].key, set.entries()[i].key);
    EXPECT_EQ(loaded.entries()[i].label, set.entries()[i].label);
  }
  EXPECT_EQ(loaded.BaseKeys().size(), 2u);
}

TEST(AnnotationSetTest, GoldFilesNeedNoSource) {
  TempDir dir;
  WriteFile(dir.Path("g.jsonl"),
            "{\"instance_key\":\"s:0-1:2-3\",\"label\":\"founders\"}\n");
  AnnotationSet gold = AnnotationSet::Load(dir.Path("g.jsonl"));
  EXPECT_EQ(gold.source(), Source::kGold);
  EXPECT_EQ(gold.size(), 1u);
}

TEST(AnnotationSetTest, MixedSourcesRejected) {
  TempDir dir;
  WriteFile(dir.Path("g.jsonl"),
            "{\"source\":\"DS\",\"instance_key\":\"s:0-1:2-3\",\"label\":\"NA\"}\n"
            "{\"source\":\"IS\",\"instance_key\":\"s:2-3:0-1\",\"label\":\"NA\"}\n");
  EXPECT_THROW(AnnotationSet::Load(dir.Path("g.jsonl")), ParseError);
}

TEST(AnnotationSetTest, ValidateChecksCorpus) {
  AnnotationSet set;
  set.Add({"s1", {0, 1}, {4, 6}, 0}, "founders");
  EXPECT_NO_THROW(set.Validate(SonyCorpus()));
  set.Add({"s9", {0, 1}, {4, 6}, 0}, "founders");
  EXPECT_THROW(set.Validate(SonyCorpus()), Error);
}

TEST(SourceTest, NamesRoundTrip) {
  for (Source s : {Source::kDS, Source::kIS, Source::kIPIN, Source::kNPIN,
                   Source::kGold, Source::kSimulated, Source::kPredicted}) {
    EXPECT_EQ(ParseSource(SourceName(s)), s);
  }
  EXPECT_THROW(ParseSource("XX"), Error);
}

}  // namespace
}  // namespace dsre
