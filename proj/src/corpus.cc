#include "dsre/corpus.h"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "dsre/errors.h"
#include "dsre/io.h"

namespace dsre {

namespace {

int ParseInt(std::string_view text, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error("bad instance key (" + std::string(what) +
                "): " + std::string(text));
  }
  return value;
}

Span ParseSpan(std::string_view text) {
  size_t dash = text.find('-');
  if (dash == std::string_view::npos) {
    throw Error("bad instance key span: " + std::string(text));
  }
  return {ParseInt(text.substr(0, dash), "span start"),
          ParseInt(text.substr(dash + 1), "span end")};
}

Span SpanFromJson(const nlohmann::json &value) {
  if (value.is_array() && value.size() == 2) {
    return {value[0].get<int>(), value[1].get<int>()};
  }
  return {value.at("start").get<int>(), value.at("end").get<int>()};
}

}  // namespace

std::string Sentence::Join(Span span) const {
  std::string out;
  for (int i = span.start; i < span.end; ++i) {
    if (i > span.start) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string Sentence::Text() const {
  return Join({0, static_cast<int>(tokens.size())});
}

std::string InstanceKey::ToString() const {
  std::string out = sentence_id + ":" + std::to_string(subj.start) + "-" +
                    std::to_string(subj.end) + ":" +
                    std::to_string(obj.start) + "-" + std::to_string(obj.end);
  if (slot > 0) out += "#" + std::to_string(slot);
  return out;
}

InstanceKey InstanceKey::Parse(std::string_view text) {
  InstanceKey key;
  size_t last_colon = text.rfind(':');
  if (last_colon == std::string_view::npos) {
    throw Error("bad instance key: " + std::string(text));
  }
  size_t hash = text.rfind('#');
  if (hash != std::string_view::npos && hash > last_colon) {
    key.slot = ParseInt(text.substr(hash + 1), "slot");
    text = text.substr(0, hash);
  }
  key.obj = ParseSpan(text.substr(last_colon + 1));
  text = text.substr(0, last_colon);
  size_t colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error("bad instance key: " + std::string(text));
  }
  key.subj = ParseSpan(text.substr(colon + 1));
  key.sentence_id = std::string(text.substr(0, colon));
  return key;
}

std::vector<Instance> EnumerateInstances(const Sentence &sentence) {
  const auto &mentions = sentence.mentions;
  std::vector<size_t> order(mentions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return mentions[a].span < mentions[b].span;
  });

  std::vector<Instance> out;
  for (size_t s : order) {
    for (size_t o : order) {
      if (s == o) continue;
      if (mentions[s].span.Overlaps(mentions[o].span)) continue;
      out.push_back({sentence.id, mentions[s], mentions[o], std::string(kNA)});
    }
  }
  return out;
}

Corpus Corpus::Load(const std::string &path) {
  Corpus corpus;
  ForEachJsonLine(path, [&](int line, const nlohmann::json &row) {
    Sentence sentence;
    sentence.id = row.at("id").get<std::string>();
    sentence.tokens = row.at("tokens").get<std::vector<std::string>>();
    for (const auto &m : row.value("mentions", nlohmann::json::array())) {
      EntityMention mention;
      mention.span = SpanFromJson(m);
      mention.ner = m.at("ner").get<std::string>();
      if (m.contains("surface")) mention.surface = m["surface"];
      sentence.mentions.push_back(std::move(mention));
    }
    if (row.contains("instances")) {
      std::vector<std::pair<Span, Span>> pairs;
      for (const auto &inst : row["instances"]) {
        pairs.emplace_back(SpanFromJson(inst.at("subj")),
                           SpanFromJson(inst.at("obj")));
      }
      corpus.AddParsed(std::move(sentence), &pairs, path, line);
    } else {
      corpus.AddParsed(std::move(sentence), nullptr, path, line);
    }
  });
  return corpus;
}

void Corpus::AddSentence(Sentence sentence) {
  AddParsed(std::move(sentence), nullptr, "<memory>", 0);
}

void Corpus::AddSentence(Sentence sentence,
                         const std::vector<std::pair<Span, Span>> &pairs) {
  AddParsed(std::move(sentence), &pairs, "<memory>", 0);
}

void Corpus::Validate(const Sentence &sentence, const std::string &origin,
                      int line) const {
  if (sentence.id.empty()) throw ParseError(origin, line, "empty sentence id");
  if (sentence.tokens.empty()) {
    throw ParseError(origin, line, "sentence " + sentence.id + " has no tokens");
  }
  if (sentence_index_.count(sentence.id)) {
    throw ParseError(origin, line, "duplicate sentence id " + sentence.id);
  }
  const int n = static_cast<int>(sentence.tokens.size());
  for (const auto &m : sentence.mentions) {
    if (m.span.start < 0 || m.span.start >= m.span.end || m.span.end > n) {
      throw SpanRangeError(origin, line,
                           "mention span [" + std::to_string(m.span.start) +
                               "," + std::to_string(m.span.end) +
                               ") out of range for " + std::to_string(n) +
                               " tokens");
    }
    if (m.ner.empty()) {
      throw ParseError(origin, line, "mention without ner type");
    }
  }
}

void Corpus::AddParsed(Sentence sentence,
                       const std::vector<std::pair<Span, Span>> *pairs,
                       const std::string &origin, int line) {
  Validate(sentence, origin, line);
  for (auto &m : sentence.mentions) {
    std::string joined = sentence.Join(m.span);
    if (!m.surface.empty() && m.surface != joined) {
      throw ParseError(origin, line,
                       "surface '" + m.surface + "' does not match tokens '" +
                           joined + "'");
    }
    m.surface = std::move(joined);
  }

  std::vector<Instance> instances;
  if (pairs == nullptr) {
    instances = EnumerateInstances(sentence);
  } else {
    auto find = [&](Span span) -> const EntityMention & {
      for (const auto &m : sentence.mentions) {
        if (m.span == span) return m;
      }
      const int n = static_cast<int>(sentence.tokens.size());
      if (span.start < 0 || span.start >= span.end || span.end > n) {
        throw SpanRangeError(origin, line,
                             "instance span [" + std::to_string(span.start) +
                                 "," + std::to_string(span.end) +
                                 ") out of range");
      }
      throw ParseError(origin, line,
                       "instance span [" + std::to_string(span.start) + "," +
                           std::to_string(span.end) +
                           ") does not match a mention");
    };
    for (const auto &[subj, obj] : *pairs) {
      const EntityMention &s = find(subj);
      const EntityMention &o = find(obj);
      if (subj.Overlaps(obj)) {
        throw OverlapError(
            origin, line,
            "subject span [" + std::to_string(subj.start) + "," +
                std::to_string(subj.end) + ") overlaps object span [" +
                std::to_string(obj.start) + "," + std::to_string(obj.end) +
                ")");
      }
      instances.push_back({sentence.id, s, o, std::string(kNA)});
    }
  }

  sentence_index_.emplace(sentence.id, sentences_.size());
  sentences_.push_back(std::move(sentence));
  for (auto &inst : instances) {
    auto [it, inserted] = instance_index_.emplace(inst.key(), instances_.size());
    if (!inserted) {
      throw ParseError(origin, line,
                       "duplicate instance " + inst.key().ToString());
    }
    instances_.push_back(std::move(inst));
  }
}

const Sentence *Corpus::FindSentence(std::string_view id) const {
  auto it = sentence_index_.find(id);
  return it == sentence_index_.end() ? nullptr : &sentences_[it->second];
}

const Instance *Corpus::FindInstance(const InstanceKey &key) const {
  auto it = instance_index_.find(key.Base());
  return it == instance_index_.end() ? nullptr : &instances_[it->second];
}

const Sentence &Corpus::SentenceOf(const Instance &instance) const {
  const Sentence *s = FindSentence(instance.sentence_id);
  if (s == nullptr) throw Error("unknown sentence " + instance.sentence_id);
  return *s;
}

KnowledgeBase KnowledgeBase::Load(const std::string &path) {
  KnowledgeBase kb;
  ForEachLine(path, [&](int line, const std::string &text) {
    size_t a = text.find('\t');
    size_t b = a == std::string::npos ? a : text.find('\t', a + 1);
    if (b == std::string::npos || text.find('\t', b + 1) != std::string::npos) {
      throw ParseError(path, line, "expected subject<TAB>relation<TAB>object");
    }
    std::string subj = text.substr(0, a);
    std::string rel = text.substr(a + 1, b - a - 1);
    std::string obj = text.substr(b + 1);
    if (subj.empty() || rel.empty() || obj.empty()) {
      throw ParseError(path, line, "empty field in knowledge-base triple");
    }
    kb.Add(subj, rel, obj);
  });
  return kb;
}

bool KnowledgeBase::Add(const std::string &subj, const std::string &relation,
                        const std::string &obj) {
  auto &rels = by_pair_[{subj, obj}];
  if (std::find(rels.begin(), rels.end(), relation) != rels.end()) {
    return false;
  }
  rels.push_back(relation);
  triples_.push_back({subj, relation, obj});
  return true;
}

std::vector<std::string> KnowledgeBase::Relations(
    const std::string &subj, const std::string &obj) const {
  auto it = by_pair_.find({subj, obj});
  if (it == by_pair_.end()) return {};
  return it->second;
}

}  // namespace dsre
