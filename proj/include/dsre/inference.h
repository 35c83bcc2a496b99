#ifndef DSRE_INFERENCE_H_
#define DSRE_INFERENCE_H_

#include <string>
#include <string_view>

#include "dsre/annotation.h"
#include "dsre/corpus.h"
#include "dsre/nli.h"
#include "dsre/schema.h"

namespace dsre {

// P_r = delta_r * max over templates of P_entail(sentence, hypothesis).
// The premise is the space-joined sentence. No NLI call is made when the
// type gate is closed.
double RelationProbability(const Instance &instance, const Sentence &sentence,
                           std::string_view relation_id,
                           const TemplateSet &templates,
                           const NliEngine &engine,
                           const RelationSchema &schema);

// Zero-shot relation: argmax of P_r over the schema, or NA when the maximum
// is below tau. Equal probabilities go to the relation declared first.
std::string InferRelation(const Instance &instance, const Sentence &sentence,
                          const RelationSchema &schema,
                          const TemplateSets &template_sets,
                          const NliEngine &engine, const NliConfig &config);

// Indirect-supervision labels for every corpus instance. Premise/hypothesis
// pairs are scored in engine batches; the result matches calling
// InferRelation instance by instance.
AnnotationSet InferCorpus(const Corpus &corpus, const RelationSchema &schema,
                          const TemplateSets &template_sets,
                          const NliEngine &engine, const NliConfig &config);

}  // namespace dsre

#endif  // DSRE_INFERENCE_H_
