#ifndef DSRE_NOISE_SIM_H_
#define DSRE_NOISE_SIM_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "dsre/annotation.h"
#include "dsre/corpus.h"

namespace dsre {

// Training-data quality against gold labels. fp_rate = fp / (tp + fp),
// fn_rate = fn / (tn + fn); a zero denominator gives rate 0.
struct NoiseReport {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t tn = 0;
  int64_t fn = 0;

  static NoiseReport FromCounts(int64_t tp, int64_t fp, int64_t tn,
                                int64_t fn);
  double fp_rate() const;
  double fn_rate() const;

  std::string ToJson() const;
};

// Aligned text table of labeled reports, one row per setting:
//   Training data   # TP   # FP   (rate)   # TN   # FN   (rate)
std::string NoiseTable(
    const std::vector<std::pair<std::string, NoiseReport>> &rows);

// Number of sentences mentioning both surfaces, keyed by the unordered
// surface pair (lexicographically smaller surface first).
std::map<std::pair<std::string, std::string>, int64_t> PairMentionCounts(
    const Corpus &corpus);

struct FnInjection {
  AnnotationSet annotations;  // source SIMULATED
  int64_t threshold = 1;      // pairs mentioned by < threshold sentences
  int64_t relabeled = 0;
  double fn_rate = 0;
};

// Relabels as NA every gold positive whose entity pair is mentioned by fewer
// sentences than a threshold. The threshold is searched exhaustively over
// 1 .. (max pair count + 1) for the FN rate closest to `target_rate`; ties
// go to the smaller threshold. Throws Error when gold has no positives.
FnInjection InjectFalseNegatives(const AnnotationSet &gold,
                                 const Corpus &corpus,
                                 double target_rate = 0.05);

// Distant-annotation replay: every NA instance whose ordered surface pair
// carries a positive label elsewhere takes that label (one slot per
// relation when the pair has several). Positives are left alone.
AnnotationSet InjectFalsePositives(const AnnotationSet &annotations,
                                   const Corpus &corpus);

// Compares each annotation with the gold label of its base instance. Every
// annotated key must exist in gold (UniverseMismatchError otherwise);
// consolidated subsets are allowed.
NoiseReport NoiseStats(const AnnotationSet &annotations,
                       const AnnotationSet &gold);

}  // namespace dsre

#endif  // DSRE_NOISE_SIM_H_
