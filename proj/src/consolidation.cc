#include "dsre/consolidation.h"

#include <algorithm>

#include "dsre/errors.h"
#include "json.hpp"

namespace dsre {

namespace {

bool IsNA(const std::string &label) { return label == kNA; }

std::vector<std::string> Positives(const std::vector<std::string> &labels) {
  std::vector<std::string> out;
  for (const auto &l : labels) {
    if (!IsNA(l) && std::find(out.begin(), out.end(), l) == out.end()) {
      out.push_back(l);
    }
  }
  return out;
}

void CheckUniverse(const AnnotationSet &ds, const AnnotationSet &is) {
  auto a = ds.BaseKeys();
  auto b = is.BaseKeys();
  if (a == b) return;
  std::string example;
  for (const auto &k : a) {
    if (!b.count(k)) {
      example = k.ToString() + " only in DS";
      break;
    }
  }
  if (example.empty()) {
    for (const auto &k : b) {
      if (!a.count(k)) {
        example = k.ToString() + " only in IS";
        break;
      }
    }
  }
  throw UniverseMismatchError("DS and IS cover different instances (" +
                              std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + "; " + example + ")");
}

Consolidated Run(Strategy strategy, const AnnotationSet &ds,
                 const AnnotationSet &is) {
  CheckUniverse(ds, is);
  Consolidated out;
  out.annotations.set_source(strategy == Strategy::kIPIN ? Source::kIPIN
                                                         : Source::kNPIN);
  out.report.strategy = strategy;
  for (const auto &e : ds.entries()) ++out.report.per_relation[e.label].ds;
  for (const auto &e : is.entries()) ++out.report.per_relation[e.label].is;

  std::set<InstanceKey> seen;
  for (const auto &entry : ds.entries()) {
    InstanceKey base = entry.key.Base();
    if (!seen.insert(base).second) continue;
    std::vector<std::string> ds_pos = Positives(ds.LabelsOf(base));
    std::vector<std::string> is_pos = Positives(is.LabelsOf(base));

    std::vector<std::string> keep;
    std::string reason;
    if (ds_pos.empty() && is_pos.empty()) {
      keep.emplace_back(kNA);
    } else if (strategy == Strategy::kNPIN) {
      if (is_pos.empty()) {
        reason = "ds_positive_only";
      } else {
        keep = is_pos;
      }
    } else {
      for (const auto &l : ds_pos) {
        if (std::find(is_pos.begin(), is_pos.end(), l) != is_pos.end()) {
          keep.push_back(l);
        }
      }
      if (keep.empty()) {
        reason = is_pos.empty()   ? "ds_positive_only"
                 : ds_pos.empty() ? "is_positive_only"
                                  : "label_conflict";
      }
    }

    if (keep.empty()) {
      out.report.removed[reason].push_back(base.ToString());
      continue;
    }
    InstanceKey key = base;
    for (auto &label : keep) {
      ++out.report.per_relation[label].output;
      out.annotations.Add(key, std::move(label));
      ++key.slot;
    }
  }
  return out;
}

}  // namespace

Strategy ParseStrategy(std::string_view name) {
  if (name == "ipin" || name == "IPIN") return Strategy::kIPIN;
  if (name == "npin" || name == "NPIN") return Strategy::kNPIN;
  throw ConfigError("strategy must be ipin or npin, got '" +
                    std::string(name) + "'");
}

std::string_view StrategyName(Strategy strategy) {
  return strategy == Strategy::kIPIN ? "ipin" : "npin";
}

std::string ConsolidationReport::ToJson() const {
  nlohmann::ordered_json out;
  out["strategy"] = StrategyName(strategy);
  auto rels = nlohmann::ordered_json::object();
  for (const auto &[rel, c] : per_relation) {
    rels[rel] = {{"ds", c.ds}, {"is", c.is}, {"output", c.output}};
  }
  out["per_relation"] = rels;
  auto removed_json = nlohmann::ordered_json::object();
  for (const auto &[reason, keys] : removed) removed_json[reason] = keys;
  out["removed"] = removed_json;
  return out.dump(2) + "\n";
}

Consolidated Ipin(const AnnotationSet &ds, const AnnotationSet &is) {
  return Run(Strategy::kIPIN, ds, is);
}

Consolidated Npin(const AnnotationSet &ds, const AnnotationSet &is) {
  return Run(Strategy::kNPIN, ds, is);
}

Consolidated Consolidate(Strategy strategy, const AnnotationSet &ds,
                         const AnnotationSet &is) {
  return Run(strategy, ds, is);
}

}  // namespace dsre
