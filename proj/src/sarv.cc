#include "dsre/sarv.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dsre/errors.h"
#include "dsre/io.h"
#include "dsre/text.h"

namespace dsre {

namespace {

constexpr std::string_view kStageNames[] = {"initial", "grouped", "pruned",
                                            "screened"};

// Example sentences kept per group.
constexpr size_t kGroupExamples = 3;

bool IsPlaceholder(std::string_view token) {
  return token == kSubjSlot || token == kObjSlot;
}

// Shortest first, then more frequent, then text.
bool GroupingOrder(const Pattern &a, const Pattern &b) {
  if (a.length() != b.length()) return a.length() < b.length();
  if (a.frequency != b.frequency) return a.frequency > b.frequency;
  return a.tokens < b.tokens;
}

// Highest group frequency first, then shorter, then text.
bool RankOrder(const Pattern &a, const Pattern &b) {
  if (a.frequency != b.frequency) return a.frequency > b.frequency;
  if (a.length() != b.length()) return a.length() < b.length();
  return a.tokens < b.tokens;
}

}  // namespace

std::string Pattern::Text() const { return Join(tokens); }

size_t Pattern::ContentLength() const {
  return static_cast<size_t>(std::count_if(
      tokens.begin(), tokens.end(),
      [](const std::string &t) { return !IsPlaceholder(t); }));
}

Pattern Pattern::FromText(std::string_view text, int64_t frequency) {
  Pattern p;
  p.tokens = SplitWhitespace(text);
  p.frequency = frequency;
  return p;
}

std::string_view StageName(PatternStage stage) {
  return kStageNames[static_cast<int>(stage)];
}

PatternStage ParseStage(std::string_view name) {
  for (int i = 0; i < 4; ++i) {
    if (kStageNames[i] == name) return static_cast<PatternStage>(i);
  }
  throw Error("unknown pattern stage: " + std::string(name));
}

int64_t PatternSet::TotalFrequency() const {
  int64_t total = 0;
  for (const auto &p : patterns) total += p.frequency;
  return total;
}

void SavePatternSets(const std::string &path,
                     const std::vector<PatternSet> &sets) {
  std::ostringstream out;
  for (const auto &set : sets) {
    for (const auto &p : set.patterns) {
      nlohmann::ordered_json row;
      row["relation"] = set.relation;
      row["tokens"] = p.tokens;
      row["frequency"] = p.frequency;
      row["stage"] = StageName(set.stage);
      row["examples"] = p.examples;
      if (!p.members.empty()) {
        auto members = nlohmann::ordered_json::array();
        for (const auto &m : p.members) {
          members.push_back(
              {{"text", m.text}, {"length", m.length},
               {"frequency", m.frequency}});
        }
        row["members"] = members;
      }
      out << row.dump() << '\n';
    }
  }
  WriteFileAtomic(path, out.str());
}

std::map<std::string, PatternSet> LoadPatternSets(const std::string &path) {
  std::map<std::string, PatternSet> sets;
  ForEachJsonLine(path, [&](int line, const nlohmann::json &row) {
    std::string relation = row.at("relation");
    PatternStage stage = ParseStage(row.at("stage").get<std::string>());
    auto [it, fresh] = sets.try_emplace(relation);
    PatternSet &set = it->second;
    if (fresh) {
      set.relation = relation;
      set.stage = stage;
    } else if (set.stage != stage) {
      throw ParseError(path, line, "mixed stages for relation " + relation);
    }
    Pattern p;
    p.tokens = row.at("tokens").get<std::vector<std::string>>();
    p.frequency = row.at("frequency").get<int64_t>();
    if (p.frequency < 0) throw ParseError(path, line, "negative frequency");
    p.examples = row.value("examples", std::vector<std::string>{});
    for (const auto &m : row.value("members", nlohmann::json::array())) {
      p.members.push_back({m.at("text"), m.at("length"), m.at("frequency")});
    }
    set.patterns.push_back(std::move(p));
  });
  return sets;
}

void SarvConfig::Validate() const {
  if (!(top_fraction > 0 && top_fraction <= 1)) {
    throw ConfigError("sarv.top_fraction must be in (0, 1]");
  }
  if (max_pattern_tokens <= 0 || max_candidates_per_relation <= 0 ||
      min_screening_frequency <= 0 || max_examples <= 0) {
    throw ConfigError("sarv limits must be positive");
  }
}

std::string PatternFillers::ForType(std::string_view ner, bool subject) {
  if (ner == "PERSON") return "John Smith";
  if (ner == "ORGANIZATION") return "the company";
  if (ner == "LOCATION") return "the city";
  return subject ? "X" : "Y";
}

PatternFillers PatternFillers::ForRelation(const RelationSchema &schema,
                                           std::string_view relation) {
  const auto &rel = schema.Get(relation);
  const auto &[s, o] = rel.ner_constraints.front();
  return {ForType(s, true), ForType(o, false)};
}

std::string Instantiate(const Pattern &pattern, const PatternFillers &fillers) {
  std::vector<std::string> out;
  out.reserve(pattern.tokens.size());
  for (const auto &t : pattern.tokens) {
    if (t == kSubjSlot) {
      out.push_back(fillers.subj);
    } else if (t == kObjSlot) {
      out.push_back(fillers.obj);
    } else {
      out.push_back(t);
    }
  }
  return Join(out);
}

std::string Instantiate(const Template &tmpl, const PatternFillers &fillers) {
  return GenerateHypothesis(tmpl, fillers.subj, fillers.obj);
}

PatternSet MinePatterns(const AnnotationSet &ds, const Corpus &corpus,
                        std::string_view relation, int max_examples) {
  PatternSet out;
  out.relation = std::string(relation);
  out.stage = PatternStage::kInitial;
  std::map<std::vector<std::string>, size_t> index;
  for (const auto &entry : ds.entries()) {
    if (entry.label != relation) continue;
    const Instance *inst = corpus.FindInstance(entry.key);
    if (inst == nullptr) {
      throw Error("DS annotation for unknown instance " +
                  entry.key.ToString());
    }
    const Sentence &sentence = corpus.SentenceOf(*inst);
    const bool subj_first = inst->subj.span.start < inst->obj.span.start;
    const Span &first = subj_first ? inst->subj.span : inst->obj.span;
    const Span &second = subj_first ? inst->obj.span : inst->subj.span;

    std::vector<std::string> tokens;
    tokens.emplace_back(subj_first ? kSubjSlot : kObjSlot);
    for (int i = first.end; i < second.start; ++i) {
      tokens.push_back(sentence.tokens[i]);
    }
    tokens.emplace_back(subj_first ? kObjSlot : kSubjSlot);

    auto [it, fresh] = index.try_emplace(tokens, out.patterns.size());
    if (fresh) {
      Pattern p;
      p.tokens = std::move(tokens);
      out.patterns.push_back(std::move(p));
    }
    Pattern &p = out.patterns[it->second];
    ++p.frequency;
    if (static_cast<int>(p.examples.size()) < max_examples) {
      p.examples.push_back(entry.key.Base().ToString());
    }
  }
  std::stable_sort(out.patterns.begin(), out.patterns.end(), RankOrder);
  return out;
}

PatternSet FilterPatterns(const PatternSet &initial, const SarvConfig &config) {
  config.Validate();
  if (initial.stage != PatternStage::kInitial) {
    throw Error("FilterPatterns expects an initial pattern set");
  }
  std::vector<Pattern> ranked = initial.patterns;
  std::stable_sort(ranked.begin(), ranked.end(), RankOrder);

  // Cut to the most frequent fraction.
  size_t keep = static_cast<size_t>(
      std::ceil(config.top_fraction * static_cast<double>(ranked.size()) -
                1e-9));
  if (!ranked.empty()) keep = std::max<size_t>(keep, 1);
  ranked.resize(std::min(keep, ranked.size()));

  PatternSet out;
  out.relation = initial.relation;
  out.stage = PatternStage::kInitial;
  for (auto &p : ranked) {
    if (p.ContentLength() >= static_cast<size_t>(config.max_pattern_tokens)) {
      continue;
    }
    bool has_content = std::any_of(
        p.tokens.begin(), p.tokens.end(), [](const std::string &t) {
          return !IsPlaceholder(t) && !IsStopWord(t);
        });
    if (!has_content) continue;
    out.patterns.push_back(std::move(p));
  }
  if (out.patterns.size() >
      static_cast<size_t>(config.max_candidates_per_relation)) {
    out.patterns.resize(config.max_candidates_per_relation);
  }
  return out;
}

bool IsDuplicate(const Pattern &longer, const Pattern &shorter,
                 const NliEngine &engine, double tau,
                 const PatternFillers &fillers) {
  if (longer.length() < shorter.length()) {
    throw Error("IsDuplicate: '" + longer.Text() + "' is shorter than '" +
                shorter.Text() + "'");
  }
  return engine.Score(Instantiate(longer, fillers),
                      Instantiate(shorter, fillers))
             .entail >= tau;
}

PatternSet GroupPatterns(const PatternSet &filtered, const NliEngine &engine,
                         double tau, const PatternFillers &fillers) {
  if (filtered.stage != PatternStage::kInitial) {
    throw Error("GroupPatterns expects a filtered initial pattern set");
  }
  std::vector<Pattern> ps = filtered.patterns;
  std::stable_sort(ps.begin(), ps.end(), GroupingOrder);
  for (auto &p : ps) {
    p.members = {{p.Text(), p.length(), p.frequency}};
  }
  std::vector<std::string> text(ps.size());
  for (size_t i = 0; i < ps.size(); ++i) text[i] = Instantiate(ps[i], fillers);

  for (size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].frequency == 0) continue;  // absorbed earlier
    std::vector<size_t> cand;
    std::vector<NliPair> pairs;
    for (size_t j = i + 1; j < ps.size(); ++j) {
      if (ps[j].frequency > 0) {
        cand.push_back(j);
        pairs.push_back({text[j], text[i]});
      }
    }
    if (pairs.empty()) break;
    std::vector<NliScore> scores = engine.ScoreBatch(pairs);
    for (size_t k = 0; k < cand.size(); ++k) {
      if (scores[k].entail < tau) continue;
      Pattern &leader = ps[i];
      Pattern &dup = ps[cand[k]];
      leader.frequency += dup.frequency;
      dup.frequency = 0;
      leader.members.insert(leader.members.end(), dup.members.begin(),
                            dup.members.end());
      dup.members.clear();
      for (auto &ex : dup.examples) {
        if (leader.examples.size() >= kGroupExamples) break;
        leader.examples.push_back(std::move(ex));
      }
    }
  }

  PatternSet out;
  out.relation = filtered.relation;
  out.stage = PatternStage::kGrouped;
  for (auto &p : ps) {
    if (p.frequency > 0) out.patterns.push_back(std::move(p));
  }
  std::stable_sort(out.patterns.begin(), out.patterns.end(), RankOrder);
  return out;
}

PatternSet PruneByGeneralTemplate(const PatternSet &grouped,
                                  const Template &general,
                                  const NliEngine &engine, double tau,
                                  const PatternFillers &fillers) {
  if (grouped.stage != PatternStage::kGrouped) {
    throw Error("PruneByGeneralTemplate expects a grouped pattern set");
  }
  PatternSet out;
  out.relation = grouped.relation;
  out.stage = PatternStage::kPruned;
  if (grouped.patterns.empty()) return out;

  const std::string hypothesis = Instantiate(general, fillers);
  std::vector<NliPair> pairs;
  for (const auto &p : grouped.patterns) {
    pairs.push_back({Instantiate(p, fillers), hypothesis});
  }
  std::vector<NliScore> scores = engine.ScoreBatch(pairs);
  for (size_t i = 0; i < grouped.patterns.size(); ++i) {
    if (scores[i].entail < tau) out.patterns.push_back(grouped.patterns[i]);
  }
  return out;
}

}  // namespace dsre
