#ifndef DSRE_EVALUATION_H_
#define DSRE_EVALUATION_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dsre/annotation.h"

namespace dsre {

struct Counts {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;
};

struct Metrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
  std::map<std::string, Counts> per_relation;
  std::vector<std::string> warnings;
};

// Micro-averaged scores over non-NA labels. Labels are compared per base
// instance, so multi-slot annotations on either side count once per label.
// Throws UniverseMismatchError when the two sets cover different instances
// and Error when gold has no positive label. With no positive prediction,
// precision is 0 and a warning is recorded.
Metrics Evaluate(const AnnotationSet &predictions, const AnnotationSet &gold);

std::string MetricsJson(const Metrics &metrics);

// Relation / P / R / F1 columns in percent, two decimals. Per-relation rows
// are followed by the micro-averaged row; no relations gives the header only.
std::string MetricsTable(const Metrics &metrics);

// Percentage with two decimals: 0.7598 -> "75.98".
std::string Percent(double value);

}  // namespace dsre

#endif  // DSRE_EVALUATION_H_
