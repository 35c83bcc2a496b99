#include "dsre/noise_sim.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "dsre/errors.h"
#include "json.hpp"

namespace dsre {

namespace {

using SurfacePair = std::pair<std::string, std::string>;

SurfacePair Unordered(const std::string &a, const std::string &b) {
  return a <= b ? SurfacePair{a, b} : SurfacePair{b, a};
}

// Sentences mentioning a surface, as sorted sentence indices.
std::map<std::string, std::vector<size_t>> SurfaceIndex(const Corpus &corpus) {
  std::map<std::string, std::vector<size_t>> index;
  const auto &sentences = corpus.sentences();
  for (size_t i = 0; i < sentences.size(); ++i) {
    for (const auto &m : sentences[i].mentions) {
      auto &list = index[m.surface];
      if (list.empty() || list.back() != i) list.push_back(i);
    }
  }
  return index;
}

int64_t CountBoth(const std::map<std::string, std::vector<size_t>> &index,
                  const std::string &a, const std::string &b) {
  auto ia = index.find(a);
  auto ib = index.find(b);
  if (ia == index.end() || ib == index.end()) return 0;
  std::vector<size_t> both;
  std::set_intersection(ia->second.begin(), ia->second.end(),
                        ib->second.begin(), ib->second.end(),
                        std::back_inserter(both));
  return static_cast<int64_t>(both.size());
}

double Rate(int64_t num, int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

NoiseReport NoiseReport::FromCounts(int64_t tp, int64_t fp, int64_t tn,
                                    int64_t fn) {
  if (tp < 0 || fp < 0 || tn < 0 || fn < 0) {
    throw Error("noise counts must be non-negative");
  }
  return {tp, fp, tn, fn};
}

double NoiseReport::fp_rate() const { return Rate(fp, tp + fp); }
double NoiseReport::fn_rate() const { return Rate(fn, tn + fn); }

std::string NoiseReport::ToJson() const {
  nlohmann::ordered_json out;
  out["tp"] = tp;
  out["fp"] = fp;
  out["tn"] = tn;
  out["fn"] = fn;
  out["fp_rate"] = fp_rate();
  out["fn_rate"] = fn_rate();
  return out.dump(2) + "\n";
}

std::string NoiseTable(
    const std::vector<std::pair<std::string, NoiseReport>> &rows) {
  size_t name_width = std::string_view("Training data").size();
  for (const auto &[name, _] : rows) name_width = std::max(name_width, name.size());
  std::string out = fmt::format("{:<{}}  {:>8}  {:>18}  {:>8}  {:>18}\n",
                                "Training data", name_width, "# TP", "# FP",
                                "# TN", "# FN");
  for (const auto &[name, r] : rows) {
    out += fmt::format(
        "{:<{}}  {:>8}  {:>18}  {:>8}  {:>18}\n", name, name_width, r.tp,
        fmt::format("{} ({:.2f}%)", r.fp, 100.0 * r.fp_rate()), r.tn,
        fmt::format("{} ({:.2f}%)", r.fn, 100.0 * r.fn_rate()));
  }
  return out;
}

std::map<std::pair<std::string, std::string>, int64_t> PairMentionCounts(
    const Corpus &corpus) {
  std::map<SurfacePair, int64_t> counts;
  for (const auto &s : corpus.sentences()) {
    std::set<std::string> surfaces;
    for (const auto &m : s.mentions) surfaces.insert(m.surface);
    for (auto a = surfaces.begin(); a != surfaces.end(); ++a) {
      for (auto b = std::next(a); b != surfaces.end(); ++b) {
        ++counts[{*a, *b}];
      }
    }
  }
  return counts;
}

FnInjection InjectFalseNegatives(const AnnotationSet &gold,
                                 const Corpus &corpus, double target_rate) {
  if (!(target_rate >= 0 && target_rate <= 1)) {
    throw ConfigError("FN target rate must be in [0, 1]");
  }
  auto index = SurfaceIndex(corpus);
  std::map<SurfacePair, int64_t> cache;

  // Pair mention count of every gold positive, by entry position.
  std::vector<int64_t> count(gold.size(), -1);
  int64_t negatives = 0, max_count = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    const auto &e = gold.entries()[i];
    if (e.label == kNA) {
      ++negatives;
      continue;
    }
    const Instance *inst = corpus.FindInstance(e.key);
    if (inst == nullptr) {
      throw UniverseMismatchError("gold label for unknown instance " +
                                  e.key.ToString());
    }
    SurfacePair pair = Unordered(inst->subj.surface, inst->obj.surface);
    auto it = cache.find(pair);
    if (it == cache.end()) {
      it = cache.emplace(pair, CountBoth(index, pair.first, pair.second)).first;
    }
    count[i] = it->second;
    max_count = std::max(max_count, it->second);
  }
  if (std::none_of(count.begin(), count.end(),
                   [](int64_t c) { return c >= 0; })) {
    throw Error("cannot inject false negatives: gold has no positive labels");
  }

  FnInjection best;
  double best_gap = INFINITY;
  for (int64_t n = 1; n <= max_count + 1; ++n) {
    int64_t fn = 0;
    for (int64_t c : count) {
      if (c >= 0 && c < n) ++fn;
    }
    double rate = Rate(fn, negatives + fn);
    double gap = std::abs(rate - target_rate);
    if (gap < best_gap - 1e-12) {
      best_gap = gap;
      best.threshold = n;
      best.relabeled = fn;
      best.fn_rate = rate;
    }
  }

  best.annotations.set_source(Source::kSimulated);
  for (size_t i = 0; i < gold.size(); ++i) {
    const auto &e = gold.entries()[i];
    bool flip = count[i] >= 0 && count[i] < best.threshold;
    best.annotations.Add(e.key, flip ? std::string(kNA) : e.label);
  }
  return best;
}

AnnotationSet InjectFalsePositives(const AnnotationSet &annotations,
                                   const Corpus &corpus) {
  auto surfaces = [&](const InstanceKey &key) -> SurfacePair {
    const Instance *inst = corpus.FindInstance(key);
    if (inst == nullptr) {
      throw UniverseMismatchError("annotation for unknown instance " +
                                  key.ToString());
    }
    return {inst->subj.surface, inst->obj.surface};
  };

  // Ordered (subj, obj) surface pair -> relations, in first-seen order.
  std::map<SurfacePair, std::vector<std::string>> relations;
  for (const auto &e : annotations.entries()) {
    if (e.label == kNA) continue;
    auto &rels = relations[surfaces(e.key)];
    if (std::find(rels.begin(), rels.end(), e.label) == rels.end()) {
      rels.push_back(e.label);
    }
  }

  AnnotationSet out(Source::kSimulated);
  for (const auto &e : annotations.entries()) {
    if (e.label != kNA) {
      out.Add(e.key, e.label);
      continue;
    }
    auto it = relations.find(surfaces(e.key));
    if (it == relations.end()) {
      out.Add(e.key, e.label);
      continue;
    }
    InstanceKey key = e.key.Base();
    for (const auto &rel : it->second) {
      out.Add(key, rel);
      ++key.slot;
    }
  }
  return out;
}

NoiseReport NoiseStats(const AnnotationSet &annotations,
                       const AnnotationSet &gold) {
  NoiseReport report;
  for (const auto &e : annotations.entries()) {
    std::vector<std::string> truth = gold.LabelsOf(e.key);
    if (truth.empty()) {
      throw UniverseMismatchError("no gold label for " + e.key.ToString());
    }
    bool gold_na = std::all_of(truth.begin(), truth.end(),
                               [](const std::string &l) { return l == kNA; });
    if (e.label == kNA) {
      ++(gold_na ? report.tn : report.fn);
    } else if (std::find(truth.begin(), truth.end(), e.label) != truth.end()) {
      ++report.tp;
    } else {
      ++report.fp;
    }
  }
  return report;
}

}  // namespace dsre
