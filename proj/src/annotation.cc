#include "dsre/annotation.h"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "dsre/errors.h"
#include "dsre/io.h"

namespace dsre {

namespace {

constexpr std::string_view kSourceNames[] = {
    "DS", "IS", "IPIN", "NPIN", "GOLD", "SIMULATED", "PRED"};

std::string FoldCase(std::string text) {
  for (char &c : text) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return text;
}

}  // namespace

std::string_view SourceName(Source source) {
  return kSourceNames[static_cast<int>(source)];
}

Source ParseSource(std::string_view name) {
  for (int i = 0; i < 7; ++i) {
    if (kSourceNames[i] == name) return static_cast<Source>(i);
  }
  throw Error("unknown annotation source: " + std::string(name));
}

void AnnotationSet::Add(const InstanceKey &key, std::string label) {
  if (label.empty()) throw Error("empty label for " + key.ToString());
  auto [it, inserted] = index_.emplace(key, entries_.size());
  if (!inserted) {
    throw Error("instance " + key.ToString() + " labeled twice");
  }
  by_base_[key.Base()].push_back(entries_.size());
  entries_.push_back({key, std::move(label)});
}

const std::string *AnnotationSet::Find(const InstanceKey &key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &entries_[it->second].label;
}

std::vector<std::string> AnnotationSet::LabelsOf(
    const InstanceKey &base) const {
  std::vector<std::string> labels;
  auto it = by_base_.find(base.Base());
  if (it == by_base_.end()) return labels;
  std::vector<size_t> idx = it->second;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return entries_[a].key.slot < entries_[b].key.slot;
  });
  for (size_t i : idx) labels.push_back(entries_[i].label);
  return labels;
}

std::set<InstanceKey> AnnotationSet::BaseKeys() const {
  std::set<InstanceKey> keys;
  for (const auto &[base, _] : by_base_) keys.insert(base);
  return keys;
}

void AnnotationSet::Validate(const Corpus &corpus) const {
  for (const auto &entry : entries_) {
    if (corpus.FindInstance(entry.key) == nullptr) {
      throw Error("annotation refers to unknown instance " +
                  entry.key.ToString());
    }
  }
}

void AnnotationSet::Save(const std::string &path) const {
  std::ostringstream out;
  for (const auto &entry : entries_) {
    nlohmann::ordered_json row;
    row["source"] = SourceName(source_);
    row["instance_key"] = entry.key.ToString();
    row["label"] = entry.label;
    out << row.dump() << '\n';
  }
  WriteFileAtomic(path, out.str());
}

AnnotationSet AnnotationSet::Load(const std::string &path, Source fallback) {
  AnnotationSet set(fallback);
  bool first = true;
  ForEachJsonLine(path, [&](int line, const nlohmann::json &row) {
    if (row.contains("source")) {
      Source s = ParseSource(row["source"].get<std::string>());
      if (first) {
        set.source_ = s;
      } else if (s != set.source_) {
        throw ParseError(path, line, "mixed annotation sources");
      }
    }
    first = false;
    InstanceKey key;
    try {
      key = InstanceKey::Parse(row.at("instance_key").get<std::string>());
      set.Add(key, row.at("label").get<std::string>());
    } catch (const ParseError &) {
      throw;
    } catch (const Error &e) {
      throw ParseError(path, line, e.what());
    }
  });
  return set;
}

AnnotationSet DistantAnnotate(const Corpus &corpus, const KnowledgeBase &kb,
                              std::span<const std::string> relations,
                              const DistantOptions &options) {
  auto rank = [&](const std::string &rel) -> size_t {
    auto it = std::find(relations.begin(), relations.end(), rel);
    if (it == relations.end()) {
      throw ConfigError("knowledge base references unknown relation '" + rel +
                        "'");
    }
    return static_cast<size_t>(it - relations.begin());
  };

  // (subj, obj) -> relation ranks, with optional case folding.
  std::map<std::pair<std::string, std::string>, std::vector<size_t>> links;
  for (const auto &t : kb.triples()) {
    size_t r = rank(t.relation);
    std::pair<std::string, std::string> pair =
        options.case_sensitive
            ? std::make_pair(t.subj, t.obj)
            : std::make_pair(FoldCase(t.subj), FoldCase(t.obj));
    auto &ranks = links[pair];
    if (std::find(ranks.begin(), ranks.end(), r) == ranks.end()) {
      ranks.push_back(r);
    }
  }
  for (auto &[_, ranks] : links) std::sort(ranks.begin(), ranks.end());

  AnnotationSet out(Source::kDS);
  for (const auto &inst : corpus.instances()) {
    InstanceKey key = inst.key();
    auto it = options.case_sensitive
                  ? links.find({inst.subj.surface, inst.obj.surface})
                  : links.find({FoldCase(inst.subj.surface),
                                FoldCase(inst.obj.surface)});
    if (it == links.end()) {
      out.Add(key, std::string(kNA));
      continue;
    }
    int slot = 0;
    for (size_t r : it->second) {
      key.slot = slot++;
      out.Add(key, relations[r]);
    }
  }
  return out;
}

}  // namespace dsre
