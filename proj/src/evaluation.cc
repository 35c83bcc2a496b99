#include "dsre/evaluation.h"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "dsre/errors.h"
#include "json.hpp"

namespace dsre {

namespace {

double Ratio(int64_t num, int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double Harmonic(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

std::set<std::string> Positives(const std::vector<std::string> &labels) {
  std::set<std::string> out;
  for (const auto &l : labels) {
    if (l != kNA) out.insert(l);
  }
  return out;
}

nlohmann::ordered_json CountsJson(const Counts &c) {
  nlohmann::ordered_json out;
  out["precision"] = c.precision();
  out["recall"] = c.recall();
  out["f1"] = c.f1();
  out["tp"] = c.tp;
  out["fp"] = c.fp;
  out["fn"] = c.fn;
  return out;
}

}  // namespace

double Counts::precision() const { return Ratio(tp, tp + fp); }
double Counts::recall() const { return Ratio(tp, tp + fn); }
double Counts::f1() const { return Harmonic(precision(), recall()); }

std::string Percent(double value) { return fmt::format("{:.2f}", 100.0 * value); }

Metrics Evaluate(const AnnotationSet &predictions, const AnnotationSet &gold) {
  std::set<InstanceKey> keys = gold.BaseKeys();
  if (predictions.BaseKeys() != keys) {
    throw UniverseMismatchError(
        "predictions and gold cover different instances (" +
        std::to_string(predictions.BaseKeys().size()) + " vs " +
        std::to_string(keys.size()) + ")");
  }

  Metrics m;
  for (const auto &key : keys) {
    auto pred = Positives(predictions.LabelsOf(key));
    auto truth = Positives(gold.LabelsOf(key));
    for (const auto &r : pred) {
      bool hit = truth.count(r) > 0;
      ++(hit ? m.per_relation[r].tp : m.per_relation[r].fp);
      ++(hit ? m.tp : m.fp);
    }
    for (const auto &r : truth) {
      if (pred.count(r) == 0) {
        ++m.per_relation[r].fn;
        ++m.fn;
      }
    }
  }
  if (m.tp + m.fn == 0) {
    throw Error("gold has no positive labels; recall is undefined");
  }
  if (m.tp + m.fp == 0) {
    m.warnings.push_back("no positive predictions; precision reported as 0");
  }
  m.precision = Ratio(m.tp, m.tp + m.fp);
  m.recall = Ratio(m.tp, m.tp + m.fn);
  m.f1 = Harmonic(m.precision, m.recall);
  return m;
}

std::string MetricsJson(const Metrics &metrics) {
  nlohmann::ordered_json out;
  out["precision"] = metrics.precision;
  out["recall"] = metrics.recall;
  out["f1"] = metrics.f1;
  out["tp"] = metrics.tp;
  out["fp"] = metrics.fp;
  out["fn"] = metrics.fn;
  out["per_relation"] = nlohmann::ordered_json::object();
  for (const auto &[r, c] : metrics.per_relation) {
    out["per_relation"][r] = CountsJson(c);
  }
  out["warnings"] = metrics.warnings;
  return out.dump(2) + "\n";
}

std::string MetricsTable(const Metrics &metrics) {
  size_t width = std::string_view("Relation").size();
  for (const auto &[r, _] : metrics.per_relation) width = std::max(width, r.size());
  std::string out =
      fmt::format("{:<{}}  {:>6}  {:>6}  {:>6}\n", "Relation", width, "P", "R", "F1");
  if (metrics.per_relation.empty()) return out;
  for (const auto &[r, c] : metrics.per_relation) {
    out += fmt::format("{:<{}}  {:>6}  {:>6}  {:>6}\n", r, width,
                       Percent(c.precision()), Percent(c.recall()),
                       Percent(c.f1()));
  }
  out += fmt::format("{:<{}}  {:>6}  {:>6}  {:>6}\n", "micro", width,
                     Percent(metrics.precision), Percent(metrics.recall),
                     Percent(metrics.f1));
  return out;
}

}  // namespace dsre
