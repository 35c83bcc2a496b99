#include "dsre/schema.h"

#include <algorithm>
#include <cctype>

#include "dsre/errors.h"
#include "dsre/io.h"
#include "json.hpp"

namespace dsre {

namespace {

size_t CountOf(std::string_view text, std::string_view needle) {
  size_t n = 0;
  for (size_t pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::pair<std::string, std::string> ParseConstraint(
    const nlohmann::json &value) {
  if (value.is_array() && value.size() == 2) {
    return {value[0].get<std::string>(), value[1].get<std::string>()};
  }
  std::string text = value.get<std::string>();
  size_t colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw ConfigError("NER constraint must look like SUBJ:OBJ, got '" + text +
                      "'");
  }
  return {text.substr(0, colon), text.substr(colon + 1)};
}

}  // namespace

void Template::Validate() const {
  size_t s = CountOf(text, kSubjSlot);
  size_t o = CountOf(text, kObjSlot);
  if (s != 1 || o != 1) {
    throw TemplateError("template '" + text +
                        "' must contain exactly one {subj} and one {obj}");
  }
}

std::string GenerateHypothesis(const Template &tmpl, std::string_view subj,
                               std::string_view obj) {
  tmpl.Validate();
  std::string out = tmpl.text;
  size_t s = out.find(kSubjSlot);
  out.replace(s, kSubjSlot.size(), subj);
  size_t o = out.find(kObjSlot);
  // The subject surface itself might contain "{obj}"; search past it.
  if (o != std::string::npos && o >= s && o < s + subj.size()) {
    o = out.find(kObjSlot, s + subj.size());
  }
  out.replace(o, kObjSlot.size(), obj);
  return out;
}

std::string GenerateHypothesis(const Template &tmpl,
                               const EntityMention &subj,
                               const EntityMention &obj) {
  return GenerateHypothesis(tmpl, subj.surface, obj.surface);
}

const Template &TemplateSet::general() const {
  for (const auto &t : templates) {
    if (t.provenance == Provenance::kGeneral) return t;
  }
  throw TemplateError("template set for " + relation +
                      " has no general template");
}

void TemplateSet::Validate() const {
  if (templates.empty()) {
    throw TemplateError("template set for " + relation + " is empty");
  }
  size_t general = 0;
  for (const auto &t : templates) {
    t.Validate();
    if (t.provenance == Provenance::kGeneral) ++general;
  }
  if (general != 1) {
    throw TemplateError("template set for " + relation +
                        " needs exactly one general template");
  }
}

std::string TemplateSet::ToJson() const {
  nlohmann::ordered_json out;
  out["relation"] = relation;
  out["general"] = general().text;
  out["mined"] = nlohmann::ordered_json::array();
  for (const auto &t : templates) {
    if (t.provenance == Provenance::kMined) out["mined"].push_back(t.text);
  }
  return out.dump(2) + "\n";
}

TemplateSet TemplateSet::FromJson(std::string_view json) {
  TemplateSet set;
  try {
    auto value = nlohmann::json::parse(json);
    set.relation = value.at("relation").get<std::string>();
    set.templates.push_back(
        {value.at("general").get<std::string>(), Provenance::kGeneral});
    for (const auto &m : value.value("mined", nlohmann::json::array())) {
      set.templates.push_back({m.get<std::string>(), Provenance::kMined});
    }
  } catch (const nlohmann::json::exception &e) {
    throw TemplateError(std::string("bad template file: ") + e.what());
  }
  set.Validate();
  return set;
}

void TemplateSet::Save(const std::string &path) const {
  WriteFileAtomic(path, ToJson());
}

TemplateSet TemplateSet::Load(const std::string &path) {
  return FromJson(ReadJsonFile(path).dump());
}

RelationSchema::RelationSchema(std::vector<Relation> relations)
    : relations_(std::move(relations)) {
  Check();
}

RelationSchema RelationSchema::FromJson(std::string_view json) {
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(json);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError(std::string("schema is not valid JSON: ") + e.what());
  }
  std::vector<Relation> relations;
  try {
    for (const auto &r : value.at("relations")) {
      Relation rel;
      rel.id = r.at("id").get<std::string>();
      rel.general = {r.at("general_template").get<std::string>(),
                     Provenance::kGeneral};
      for (const auto &c : r.at("ner_constraints")) {
        rel.ner_constraints.push_back(ParseConstraint(c));
      }
      relations.push_back(std::move(rel));
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("bad schema: ") + e.what());
  }
  return RelationSchema(std::move(relations));
}

RelationSchema RelationSchema::Load(const std::string &path) {
  return FromJson(ReadJsonFile(path).dump());
}

void RelationSchema::Check() const {
  if (relations_.empty()) throw ConfigError("schema declares no relations");
  for (size_t i = 0; i < relations_.size(); ++i) {
    const auto &r = relations_[i];
    if (r.id.empty() || r.id == kNA) {
      throw ConfigError("invalid relation id '" + r.id + "'");
    }
    for (size_t j = 0; j < i; ++j) {
      if (relations_[j].id == r.id) {
        throw ConfigError("duplicate relation id " + r.id);
      }
    }
    if (r.ner_constraints.empty()) {
      throw ConfigError("relation " + r.id + " has no NER constraints");
    }
    try {
      r.general.Validate();
    } catch (const TemplateError &e) {
      throw ConfigError("relation " + r.id + ": " + e.what());
    }
  }
}

std::vector<std::string> RelationSchema::ids() const {
  std::vector<std::string> out;
  for (const auto &r : relations_) out.push_back(r.id);
  return out;
}

const RelationSchema::Relation &RelationSchema::Get(std::string_view id) const {
  for (const auto &r : relations_) {
    if (r.id == id) return r;
  }
  throw ConfigError("unknown relation id '" + std::string(id) + "'");
}

bool RelationSchema::Has(std::string_view id) const {
  return std::any_of(relations_.begin(), relations_.end(),
                     [&](const Relation &r) { return r.id == id; });
}

TemplateSets RelationSchema::GeneralTemplateSets() const {
  TemplateSets sets;
  for (const auto &r : relations_) {
    sets[r.id] = TemplateSet{r.id, {r.general}};
  }
  return sets;
}

std::string RelationFileStem(std::string_view relation_id) {
  std::string out;
  for (char c : relation_id) {
    bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-';
    if (keep) {
      out += c;
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  if (out.empty()) throw ConfigError("relation id has no usable characters");
  return out;
}

bool CheckTypeConstraint(const RelationSchema &schema,
                         std::string_view relation_id,
                         std::string_view subj_ner,
                         std::string_view obj_ner) {
  const auto &rel = schema.Get(relation_id);
  for (const auto &[s, o] : rel.ner_constraints) {
    if (s == subj_ner && o == obj_ner) return true;
  }
  return false;
}

}  // namespace dsre
