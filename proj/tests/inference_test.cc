#include "dsre/inference.h"

#include <algorithm>
#include <map>

#include <gtest/gtest.h>

#include "dsre/errors.h"
#include "oracles.h"
#include "test_util.h"

namespace dsre {
namespace {

using testing::HashNliEngine;
using testing::MakeSentence;

// Entailment looked up by hypothesis; 0 when absent.
class TableEngine : public NliEngine {
 public:
  explicit TableEngine(std::map<std::string, double> table)
      : table_(std::move(table)) {}
  std::vector<NliScore> ScoreBatch(
      std::span<const NliPair> pairs) const override {
    std::vector<NliScore> out;
    for (const auto &p : pairs) {
      auto it = table_.find(p.hypothesis);
      double e = it == table_.end() ? 0.0 : it->second;
      out.push_back({e, 1 - e, 0});
    }
    return out;
  }

 private:
  std::map<std::string, double> table_;
};

RelationSchema Schema() {
  return RelationSchema::FromJson(R"({"relations":[
    {"id":"founders","general_template":"{subj} was founded by {obj}",
     "ner_constraints":["ORGANIZATION:PERSON"]},
    {"id":"owned_by","general_template":"{subj} is owned by {obj}",
     "ner_constraints":["ORGANIZATION:PERSON"]},
    {"id":"company","general_template":"{subj} works for {obj}",
     "ner_constraints":["PERSON:ORGANIZATION"]}]})");
}

struct SonyFixture {
  Corpus corpus;
  SonyFixture() {
    corpus.AddSentence(MakeSentence("s", "Sony was founded by Akio Morita",
                                    {{0, 1, "ORGANIZATION"}, {4, 6, "PERSON"}}));
  }
  const Instance &sony_morita() const { return corpus.instances()[0]; }
  const Instance &morita_sony() const { return corpus.instances()[1]; }
  const Sentence &sentence() const { return corpus.sentences()[0]; }
};

TEST(RelationProbabilityTest, MockFoundersExample) {
  SonyFixture f;
  RelationSchema schema = Schema();
  MockNliEngine mock;
  double p = RelationProbability(f.sony_morita(), f.sentence(), "founders",
                                 schema.GeneralTemplateSets().at("founders"),
                                 mock, schema);
  EXPECT_EQ(p, 0.98);
}

TEST(RelationProbabilityTest, ClosedGateGivesZero) {
  SonyFixture f;
  RelationSchema schema = Schema();
  TableEngine always({{"Akio Morita was founded by Sony", 1.0}});
  EXPECT_EQ(RelationProbability(f.morita_sony(), f.sentence(), "founders",
                                schema.GeneralTemplateSets().at("founders"),
                                always, schema),
            0.0);
}

TEST(RelationProbabilityTest, MaxOverTemplates) {
  SonyFixture f;
  RelationSchema schema = Schema();
  TableEngine engine({{"Sony was founded by Akio Morita", 0.6},
                      {"Akio Morita started Sony", 0.9}});
  TemplateSet set{"founders",
                  {{"{subj} was founded by {obj}", Provenance::kGeneral},
                   {"{obj} started {subj}", Provenance::kMined}}};
  EXPECT_DOUBLE_EQ(RelationProbability(f.sony_morita(), f.sentence(),
                                       "founders", set, engine, schema),
                   0.9);
  std::reverse(set.templates.begin(), set.templates.end());
  EXPECT_DOUBLE_EQ(RelationProbability(f.sony_morita(), f.sentence(),
                                       "founders", set, engine, schema),
                   0.9);
}

TEST(InferRelationTest, MockFounders) {
  SonyFixture f;
  RelationSchema schema = Schema();
  MockNliEngine mock;
  NliConfig config;
  auto sets = schema.GeneralTemplateSets();
  EXPECT_EQ(InferRelation(f.sony_morita(), f.sentence(), schema, sets, mock,
                          config),
            "founders");
  EXPECT_EQ(InferRelation(f.morita_sony(), f.sentence(), schema, sets, mock,
                          config),
            "NA");
}

TEST(InferRelationTest, BelowThresholdIsNa) {
  SonyFixture f;
  RelationSchema schema = Schema();
  TableEngine engine({{"Sony was founded by Akio Morita", 0.94}});
  NliConfig config;
  EXPECT_EQ(InferRelation(f.sony_morita(), f.sentence(), schema,
                          schema.GeneralTemplateSets(), engine, config),
            "NA");
  config.tau = 0.9;
  EXPECT_EQ(InferRelation(f.sony_morita(), f.sentence(), schema,
                          schema.GeneralTemplateSets(), engine, config),
            "founders");
}

TEST(InferRelationTest, TieGoesToFirstDeclared) {
  SonyFixture f;
  RelationSchema schema = Schema();
  TableEngine engine({{"Sony was founded by Akio Morita", 0.97},
                      {"Sony is owned by Akio Morita", 0.97}});
  EXPECT_EQ(InferRelation(f.sony_morita(), f.sentence(), schema,
                          schema.GeneralTemplateSets(), engine, NliConfig{}),
            "founders");
  TableEngine owned({{"Sony was founded by Akio Morita", 0.96},
                     {"Sony is owned by Akio Morita", 0.97}});
  EXPECT_EQ(InferRelation(f.sony_morita(), f.sentence(), schema,
                          schema.GeneralTemplateSets(), owned, NliConfig{}),
            "owned_by");
}

TEST(InferRelationTest, MissingTemplatesIsConfigError) {
  SonyFixture f;
  RelationSchema schema = Schema();
  TemplateSets sets = schema.GeneralTemplateSets();
  sets.erase("company");
  EXPECT_THROW(InferRelation(f.sony_morita(), f.sentence(), schema, sets,
                             MockNliEngine(), NliConfig{}),
               ConfigError);
}

// Exhaustive (relation, template) grid, written independently of the
// library's batching.
TEST(InferCorpusTest, MatchesGridOracleOnFixture) {
  Corpus corpus = Corpus::Load(testing::Fixture("train.jsonl"));
  RelationSchema schema = RelationSchema::Load(testing::Fixture("schema.json"));
  TemplateSets sets = schema.GeneralTemplateSets();
  sets.at("founders").templates.push_back(
      {"{subj} co-founder {obj}", Provenance::kMined});
  sets.at("founders").templates.push_back(
      {"{obj} founded {subj}", Provenance::kMined});
  MockNliEngine mock;
  HashNliEngine hashed(7, 10);
  for (const NliEngine *engine : {static_cast<const NliEngine *>(&mock),
                                  static_cast<const NliEngine *>(&hashed)}) {
    for (double tau : {0.5, 0.9, 0.95}) {
      NliConfig config;
      config.tau = tau;
      AnnotationSet is = InferCorpus(corpus, schema, sets, *engine, config);
      ASSERT_EQ(is.size(), corpus.instances().size());
      EXPECT_EQ(is.source(), Source::kIS);
      for (const auto &inst : corpus.instances()) {
        const Sentence &s = corpus.SentenceOf(inst);
        std::string expected = oracle::GridOracle(inst, s, schema, sets, *engine, tau);
        ASSERT_EQ(*is.Find(inst.key()), expected) << inst.key().ToString();
        ASSERT_EQ(InferRelation(inst, s, schema, sets, *engine, config),
                  expected);
      }
    }
  }
}

TEST(InferCorpusTest, RaisingTauOnlyFlipsToNa) {
  Corpus corpus = Corpus::Load(testing::Fixture("train.jsonl"));
  RelationSchema schema = RelationSchema::Load(testing::Fixture("schema.json"));
  HashNliEngine engine(3, 20);
  NliConfig low, high;
  low.tau = 0.3;
  high.tau = 0.8;
  auto sets = schema.GeneralTemplateSets();
  AnnotationSet a = InferCorpus(corpus, schema, sets, engine, low);
  AnnotationSet b = InferCorpus(corpus, schema, sets, engine, high);
  size_t flipped = 0;
  for (const auto &e : a.entries()) {
    const std::string &after = *b.Find(e.key);
    if (after != e.label) {
      EXPECT_EQ(after, "NA");
      ++flipped;
    }
  }
  EXPECT_GT(flipped, 0u);
}

TEST(InferCorpusTest, AddingTemplateNeverLowersProbability) {
  SonyFixture f;
  RelationSchema schema = Schema();
  HashNliEngine engine(11, 50);
  TemplateSet set{"founders", {schema.Get("founders").general}};
  double before = RelationProbability(f.sony_morita(), f.sentence(),
                                      "founders", set, engine, schema);
  set.templates.push_back({"{obj} built {subj}", Provenance::kMined});
  EXPECT_GE(RelationProbability(f.sony_morita(), f.sentence(), "founders",
                                set, engine, schema),
            before);
}

}  // namespace
}  // namespace dsre
