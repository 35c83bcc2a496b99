#ifndef DSRE_SARV_H_
#define DSRE_SARV_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dsre/annotation.h"
#include "dsre/corpus.h"
#include "dsre/nli.h"
#include "dsre/schema.h"

namespace dsre {

// Pattern of a group, as recorded when it was absorbed.
struct GroupMember {
  std::string text;
  size_t length = 0;
  int64_t frequency = 0;
};

// Token sequence between the two entities, with the entities replaced by
// {subj} / {obj} in sentence order.
struct Pattern {
  std::vector<std::string> tokens;
  int64_t frequency = 0;
  std::vector<std::string> examples;  // instance keys
  // Filled by grouping: the representative first, then absorbed patterns.
  std::vector<GroupMember> members;

  std::string Text() const;
  // Token count including both placeholders.
  size_t length() const { return tokens.size(); }
  // Token count excluding placeholders.
  size_t ContentLength() const;

  static Pattern FromText(std::string_view text, int64_t frequency = 0);
};

enum class PatternStage { kInitial, kGrouped, kPruned, kScreened };

std::string_view StageName(PatternStage stage);
PatternStage ParseStage(std::string_view name);

struct PatternSet {
  std::string relation;
  std::vector<Pattern> patterns;
  PatternStage stage = PatternStage::kInitial;

  int64_t TotalFrequency() const;
};

// JSON Lines, one pattern per line:
// {"relation", "tokens", "frequency", "stage", "examples", "members"}.
void SavePatternSets(const std::string &path,
                     const std::vector<PatternSet> &sets);
std::map<std::string, PatternSet> LoadPatternSets(const std::string &path);

struct SarvConfig {
  double top_fraction = 0.10;
  int max_pattern_tokens = 10;
  int max_candidates_per_relation = 50;
  int min_screening_frequency = 10;
  int max_examples = 3;

  void Validate() const;
};

// Entity stand-ins used when a pattern or template is handed to the NLI
// engine without a sentence.
struct PatternFillers {
  std::string subj = "X";
  std::string obj = "Y";

  static std::string ForType(std::string_view ner, bool subject);
  // Uses the first NER constraint of the relation.
  static PatternFillers ForRelation(const RelationSchema &schema,
                                    std::string_view relation);
};

std::string Instantiate(const Pattern &pattern, const PatternFillers &fillers);
std::string Instantiate(const Template &tmpl, const PatternFillers &fillers);

// Collects {subj}/{obj} patterns from every DS-positive instance of the
// relation. Identical patterns merge; frequency counts instances. Output is
// sorted by frequency, then text.
PatternSet MinePatterns(const AnnotationSet &ds, const Corpus &corpus,
                        std::string_view relation, int max_examples = 3);

// Frequency cut to the top fraction, then drops long and stop-word-only
// patterns, then caps the candidate count. Frequencies are untouched.
PatternSet FilterPatterns(const PatternSet &initial, const SarvConfig &config);

// True when `longer` entails `shorter` with probability >= tau. Throws
// Error when `longer` is the shorter of the two.
bool IsDuplicate(const Pattern &longer, const Pattern &shorter,
                 const NliEngine &engine, double tau,
                 const PatternFillers &fillers = {});

// Semantic-duplication grouping. Patterns are visited shortest first
// (ties: higher frequency, then text); each live pattern absorbs every
// later live pattern that is a duplicate of it. Returns the surviving
// representatives ranked by group frequency.
PatternSet GroupPatterns(const PatternSet &filtered, const NliEngine &engine,
                         double tau, const PatternFillers &fillers = {});

// Removes grouped patterns that entail the general template.
PatternSet PruneByGeneralTemplate(const PatternSet &grouped,
                                  const Template &general,
                                  const NliEngine &engine, double tau,
                                  const PatternFillers &fillers = {});

}  // namespace dsre

#endif  // DSRE_SARV_H_
