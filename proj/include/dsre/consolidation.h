#ifndef DSRE_CONSOLIDATION_H_
#define DSRE_CONSOLIDATION_H_

#include <map>
#include <string>
#include <vector>

#include "dsre/annotation.h"

namespace dsre {

enum class Strategy { kIPIN, kNPIN };

Strategy ParseStrategy(std::string_view name);
std::string_view StrategyName(Strategy strategy);

struct ConsolidationReport {
  struct Counts {
    size_t ds = 0;
    size_t is = 0;
    size_t output = 0;
  };
  Strategy strategy = Strategy::kIPIN;
  // Keyed by relation id, NA included.
  std::map<std::string, Counts> per_relation;
  // Removed base instance keys by reason: "ds_positive_only",
  // "is_positive_only", "label_conflict".
  std::map<std::string, std::vector<std::string>> removed;

  std::string ToJson() const;
};

struct Consolidated {
  AnnotationSet annotations;
  ConsolidationReport report;
};

// Both strategies require DS and IS to cover the same base instances
// (UniverseMismatchError otherwise) and follow the DS input order. A
// retained instance carrying several relations gets one slot per relation.
//
// IPIN keeps r where DS and IS both say r, NA where both say NA, and drops
// every other instance.
Consolidated Ipin(const AnnotationSet &ds, const AnnotationSet &is);

// NPIN takes IS positives as they are and NA where both sources say NA.
Consolidated Npin(const AnnotationSet &ds, const AnnotationSet &is);

Consolidated Consolidate(Strategy strategy, const AnnotationSet &ds,
                         const AnnotationSet &is);

}  // namespace dsre

#endif  // DSRE_CONSOLIDATION_H_
