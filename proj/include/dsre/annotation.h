#ifndef DSRE_ANNOTATION_H_
#define DSRE_ANNOTATION_H_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dsre/corpus.h"

namespace dsre {

enum class Source { kDS, kIS, kIPIN, kNPIN, kGold, kSimulated, kPredicted };

std::string_view SourceName(Source source);
Source ParseSource(std::string_view name);

struct Annotation {
  InstanceKey key;
  std::string label;
};

// Labels for one supervision source. Entries keep insertion order; each key
// (including its slot) carries exactly one label.
class AnnotationSet {
 public:
  AnnotationSet() = default;
  explicit AnnotationSet(Source source) : source_(source) {}

  Source source() const { return source_; }
  void set_source(Source source) { source_ = source; }

  // Throws Error when the key is already labeled.
  void Add(const InstanceKey &key, std::string label);

  const std::vector<Annotation> &entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Label of an exact key (slot included), or nullptr.
  const std::string *Find(const InstanceKey &key) const;

  // All labels attached to the base instance, in slot order.
  std::vector<std::string> LabelsOf(const InstanceKey &base) const;

  // Distinct base instance keys.
  std::set<InstanceKey> BaseKeys() const;

  // Throws Error when some key does not name an instance of the corpus.
  void Validate(const Corpus &corpus) const;

  // JSON Lines of {"source", "instance_key", "label"}. Load also accepts
  // gold files without a "source" field; `fallback` is used for those.
  void Save(const std::string &path) const;
  static AnnotationSet Load(const std::string &path,
                            Source fallback = Source::kGold);

 private:
  Source source_ = Source::kGold;
  std::vector<Annotation> entries_;
  std::map<InstanceKey, size_t> index_;
  std::map<InstanceKey, std::vector<size_t>> by_base_;
};

struct DistantOptions {
  // Entity linking compares surfaces exactly. Clearing this folds ASCII case.
  bool case_sensitive = true;
};

// Labels every corpus instance r when (subj, r, obj) is in the knowledge
// base, NA otherwise. A pair linked by several relations gets one slot per
// relation, ordered as in `relations`. Throws ConfigError when the knowledge
// base mentions a relation outside `relations`.
AnnotationSet DistantAnnotate(const Corpus &corpus, const KnowledgeBase &kb,
                              std::span<const std::string> relations,
                              const DistantOptions &options = {});

}  // namespace dsre

#endif  // DSRE_ANNOTATION_H_
