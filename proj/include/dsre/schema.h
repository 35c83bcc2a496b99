#ifndef DSRE_SCHEMA_H_
#define DSRE_SCHEMA_H_

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsre/corpus.h"

namespace dsre {

inline constexpr std::string_view kSubjSlot = "{subj}";
inline constexpr std::string_view kObjSlot = "{obj}";

enum class Provenance { kGeneral, kMined };

// Verbalization of a relation with {subj} and {obj} placeholders.
struct Template {
  std::string text;
  Provenance provenance = Provenance::kGeneral;

  // Throws TemplateError unless each placeholder occurs exactly once.
  void Validate() const;
  bool operator==(const Template &) const = default;
};

// Substitutes the mention surfaces into the template.
std::string GenerateHypothesis(const Template &tmpl, std::string_view subj,
                               std::string_view obj);
std::string GenerateHypothesis(const Template &tmpl,
                               const EntityMention &subj,
                               const EntityMention &obj);

// Templates used to verbalize one relation. The first entry is the general
// template; mined ones follow in screening rank order.
struct TemplateSet {
  std::string relation;
  std::vector<Template> templates;

  const Template &general() const;
  // Throws TemplateError unless there is exactly one general template and
  // every template is well formed.
  void Validate() const;

  // {"relation", "general", "mined": [...]}
  std::string ToJson() const;
  static TemplateSet FromJson(std::string_view json);
  void Save(const std::string &path) const;
  static TemplateSet Load(const std::string &path);
};

using TemplateSets = std::map<std::string, TemplateSet, std::less<>>;

// Relation inventory with general templates and NER type constraints.
class RelationSchema {
 public:
  struct Relation {
    std::string id;
    Template general;
    std::vector<std::pair<std::string, std::string>> ner_constraints;
  };

  RelationSchema() = default;
  explicit RelationSchema(std::vector<Relation> relations);

  // {"relations": [{"id", "general_template",
  //                 "ner_constraints": ["SUBJ_NER:OBJ_NER", ...]}]}
  static RelationSchema Load(const std::string &path);
  static RelationSchema FromJson(std::string_view json);

  const std::vector<Relation> &relations() const { return relations_; }
  std::vector<std::string> ids() const;

  // Throws ConfigError for unknown ids.
  const Relation &Get(std::string_view id) const;
  bool Has(std::string_view id) const;

  // Template sets holding only the general templates.
  TemplateSets GeneralTemplateSets() const;

 private:
  void Check() const;

  std::vector<Relation> relations_;
};

// File-name-safe form of a relation id: "/business/company/founders"
// becomes "business_company_founders".
std::string RelationFileStem(std::string_view relation_id);

// delta_r: true iff (subj_ner, obj_ner) is an allowed type pair for the
// relation. Throws ConfigError for unknown relations.
bool CheckTypeConstraint(const RelationSchema &schema,
                         std::string_view relation_id,
                         std::string_view subj_ner, std::string_view obj_ner);

}  // namespace dsre

#endif  // DSRE_SCHEMA_H_
