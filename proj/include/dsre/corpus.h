#ifndef DSRE_CORPUS_H_
#define DSRE_CORPUS_H_

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dsre {

// Label used for "no relation of interest".
inline constexpr std::string_view kNA = "NA";

// Half-open token range [start, end).
struct Span {
  int start = 0;
  int end = 0;

  int size() const { return end - start; }
  bool Overlaps(const Span &other) const {
    return start < other.end && other.start < end;
  }
  auto operator<=>(const Span &) const = default;
};

struct EntityMention {
  Span span;
  std::string surface;  // tokens of the span joined by single spaces
  std::string ner;
};

struct Sentence {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<EntityMention> mentions;

  // Space-joined tokens. This is the NLI premise.
  std::string Text() const;
  std::string Join(Span span) const;
};

// Stable instance identity: sentence id plus both spans. The slot
// distinguishes several labels emitted for the same entity pair (a pair
// matching two knowledge-base relations yields two annotations).
struct InstanceKey {
  std::string sentence_id;
  Span subj;
  Span obj;
  int slot = 0;

  // "<sentence>:<ss>-<se>:<os>-<oe>", plus "#<slot>" when slot > 0.
  std::string ToString() const;
  static InstanceKey Parse(std::string_view text);

  InstanceKey Base() const { return {sentence_id, subj, obj, 0}; }
  auto operator<=>(const InstanceKey &) const = default;
};

struct Instance {
  std::string sentence_id;
  EntityMention subj;
  EntityMention obj;
  std::string label{kNA};

  InstanceKey key() const { return {sentence_id, subj.span, obj.span, 0}; }
};

// One unlabeled instance per ordered pair of non-overlapping mentions,
// ordered by subject start, then object start.
std::vector<Instance> EnumerateInstances(const Sentence &sentence);

// Sentences plus the instances defined over them. Immutable after loading.
class Corpus {
 public:
  Corpus() = default;

  // Reads JSON Lines: {"id", "tokens", "mentions": [{start, end, ner}]}.
  // A line may carry an explicit "instances" array of
  // {"subj": [start, end], "obj": [start, end]}; otherwise every ordered
  // mention pair is enumerated.
  static Corpus Load(const std::string &path);

  // Appends a sentence after validating it. With no explicit pairs the
  // sentence's instances are enumerated.
  void AddSentence(Sentence sentence);
  void AddSentence(Sentence sentence,
                   const std::vector<std::pair<Span, Span>> &pairs);

  const std::vector<Sentence> &sentences() const { return sentences_; }
  const std::vector<Instance> &instances() const { return instances_; }

  const Sentence *FindSentence(std::string_view id) const;
  const Instance *FindInstance(const InstanceKey &key) const;
  const Sentence &SentenceOf(const Instance &instance) const;

 private:
  void Validate(const Sentence &sentence, const std::string &origin,
                int line) const;
  void AddParsed(Sentence sentence,
                 const std::vector<std::pair<Span, Span>> *pairs,
                 const std::string &origin, int line);

  std::vector<Sentence> sentences_;
  std::vector<Instance> instances_;
  std::map<std::string, size_t, std::less<>> sentence_index_;
  std::map<InstanceKey, size_t> instance_index_;
};

// Knowledge-base triples keyed by (subject surface, object surface).
class KnowledgeBase {
 public:
  // Tab-separated subject, relation, object. Duplicate lines collapse.
  static KnowledgeBase Load(const std::string &path);

  // Returns false when the triple is already present.
  bool Add(const std::string &subj, const std::string &relation,
           const std::string &obj);

  // Relations linking the pair, in insertion order.
  std::vector<std::string> Relations(const std::string &subj,
                                     const std::string &obj) const;

  struct Triple {
    std::string subj;
    std::string relation;
    std::string obj;
  };
  const std::vector<Triple> &triples() const { return triples_; }
  size_t size() const { return triples_.size(); }

 private:
  std::vector<Triple> triples_;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>>
      by_pair_;
};

}  // namespace dsre

#endif  // DSRE_CORPUS_H_
