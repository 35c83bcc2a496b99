#include "dsre/inference.h"

#include <algorithm>

#include "dsre/errors.h"

namespace dsre {

namespace {

const TemplateSet &TemplatesFor(const TemplateSets &sets,
                                std::string_view relation) {
  auto it = sets.find(relation);
  if (it == sets.end() || it->second.templates.empty()) {
    throw ConfigError("no templates for relation '" + std::string(relation) +
                      "'");
  }
  return it->second;
}

std::string Decide(const RelationSchema &schema,
                   const std::vector<double> &probs, double tau) {
  size_t best = 0;
  for (size_t r = 1; r < probs.size(); ++r) {
    if (probs[r] > probs[best]) best = r;
  }
  if (probs.empty() || probs[best] < tau) return std::string(kNA);
  return schema.relations()[best].id;
}

}  // namespace

double RelationProbability(const Instance &instance, const Sentence &sentence,
                           std::string_view relation_id,
                           const TemplateSet &templates,
                           const NliEngine &engine,
                           const RelationSchema &schema) {
  if (templates.templates.empty()) {
    throw ConfigError("no templates for relation '" +
                      std::string(relation_id) + "'");
  }
  if (!CheckTypeConstraint(schema, relation_id, instance.subj.ner,
                           instance.obj.ner)) {
    return 0.0;
  }
  const std::string premise = sentence.Text();
  std::vector<NliPair> pairs;
  for (const auto &t : templates.templates) {
    pairs.push_back(
        {premise, GenerateHypothesis(t, instance.subj, instance.obj)});
  }
  double best = 0.0;
  for (const auto &s : engine.ScoreBatch(pairs)) best = std::max(best, s.entail);
  return best;
}

std::string InferRelation(const Instance &instance, const Sentence &sentence,
                          const RelationSchema &schema,
                          const TemplateSets &template_sets,
                          const NliEngine &engine, const NliConfig &config) {
  std::vector<double> probs;
  for (const auto &rel : schema.relations()) {
    probs.push_back(RelationProbability(instance, sentence, rel.id,
                                        TemplatesFor(template_sets, rel.id),
                                        engine, schema));
  }
  return Decide(schema, probs, config.tau);
}

AnnotationSet InferCorpus(const Corpus &corpus, const RelationSchema &schema,
                          const TemplateSets &template_sets,
                          const NliEngine &engine, const NliConfig &config) {
  config.Validate();
  const auto &relations = schema.relations();
  for (const auto &rel : relations) TemplatesFor(template_sets, rel.id);

  AnnotationSet out(Source::kIS);
  const auto &instances = corpus.instances();
  // Instances are processed in blocks so one engine call carries many pairs.
  const size_t block = 256;
  for (size_t begin = 0; begin < instances.size(); begin += block) {
    size_t end = std::min(instances.size(), begin + block);
    std::vector<NliPair> pairs;
    // owner[k] = (instance index, relation index) of pairs[k]
    std::vector<std::pair<size_t, size_t>> owner;
    for (size_t i = begin; i < end; ++i) {
      const Instance &inst = instances[i];
      const std::string premise = corpus.SentenceOf(inst).Text();
      for (size_t r = 0; r < relations.size(); ++r) {
        if (!CheckTypeConstraint(schema, relations[r].id, inst.subj.ner,
                                 inst.obj.ner)) {
          continue;
        }
        for (const auto &t : TemplatesFor(template_sets, relations[r].id)
                                 .templates) {
          pairs.push_back(
              {premise, GenerateHypothesis(t, inst.subj, inst.obj)});
          owner.emplace_back(i, r);
        }
      }
    }
    std::vector<NliScore> scores;
    if (!pairs.empty()) scores = engine.ScoreBatch(pairs);
    if (scores.size() != pairs.size()) {
      throw MalformedResponseError("engine returned wrong number of scores");
    }

    std::vector<std::vector<double>> probs(
        end - begin, std::vector<double>(relations.size(), 0.0));
    for (size_t k = 0; k < pairs.size(); ++k) {
      double &p = probs[owner[k].first - begin][owner[k].second];
      p = std::max(p, scores[k].entail);
    }
    for (size_t i = begin; i < end; ++i) {
      out.Add(instances[i].key(), Decide(schema, probs[i - begin], config.tau));
    }
  }
  return out;
}

}  // namespace dsre
