#ifndef DSRE_CLASSIFIER_H_
#define DSRE_CLASSIFIER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dsre/annotation.h"
#include "dsre/corpus.h"

namespace dsre {

// Entity representation fed to the classifier.
//   EM:  entity spans become SUBJ-<NER> / OBJ-<NER>; other mentions become
//        their bare NER type, so no entity surface reaches the features.
//   TEM: surfaces stay, wrapped in <subj:NER> ... </subj> markers.
enum class EntityMode { kEM, kTEM };

std::string_view ModeName(EntityMode mode);
EntityMode ParseMode(std::string_view name);

std::vector<std::string> EntityTokenStream(const Instance &instance,
                                           const Sentence &sentence,
                                           EntityMode mode);

// Sparse vector over hashed feature ids, sorted by id, unit L2 norm.
struct FeatureVector {
  std::vector<std::pair<uint32_t, double>> entries;
};

// Unigrams and bigrams of the token stream, the tokens between the two
// entities, the NER type pair and a bucketed token distance, hashed into
// `dim` buckets.
FeatureVector Featurize(const Instance &instance, const Sentence &sentence,
                        EntityMode mode, uint32_t dim);

struct TrainConfig {
  EntityMode mode = EntityMode::kEM;
  uint32_t hash_dim = 1u << 18;
  double learning_rate = 1.0;
  int epochs = 300;
  double l2 = 1e-4;
  uint64_t seed = 13;
  double init_scale = 0.01;

  void Validate() const;
  bool operator==(const TrainConfig &) const = default;
};

// Training example over compact feature indices.
struct Example {
  std::vector<std::pair<uint32_t, double>> x;
  int y = 0;
};

// Mean multinomial cross-entropy plus (l2 / 2) * |W|^2. Parameters are the
// row-major weight matrix (features x classes) followed by the class
// biases; biases are not regularized.
class SoftmaxObjective {
 public:
  SoftmaxObjective(const std::vector<Example> &examples, size_t num_features,
                   size_t num_classes, double l2);

  size_t num_params() const { return (num_features_ + 1) * num_classes_; }
  double Loss(const std::vector<double> &params) const;
  double LossAndGradient(const std::vector<double> &params,
                         std::vector<double> *gradient) const;

 private:
  const std::vector<Example> &examples_;
  size_t num_features_;
  size_t num_classes_;
  double l2_;
};

// Multi-class linear model. Class 0 is NA; the rest follow the relation
// declaration order. Ties in prediction go to the lower class index.
class LinearModel {
 public:
  const std::vector<std::string> &classes() const { return classes_; }
  const TrainConfig &config() const { return config_; }
  const std::vector<double> &bias() const { return bias_; }
  // Training loss before each update, then after the last one.
  const std::vector<double> &loss_history() const { return loss_history_; }
  size_t num_features() const { return feature_ids_.size(); }

  std::vector<double> Scores(const FeatureVector &features) const;
  std::string PredictFeatures(const FeatureVector &features) const;

  // Throws ConfigError when `mode` differs from the training mode.
  std::string Predict(const Instance &instance, const Sentence &sentence,
                      EntityMode mode) const;

  // Versioned JSON weight dump with the training config embedded.
  void Save(const std::string &path) const;
  static LinearModel Load(const std::string &path);

  bool operator==(const LinearModel &) const = default;

 private:
  friend LinearModel Train(const AnnotationSet &, const Corpus &,
                           const std::vector<std::string> &,
                           const TrainConfig &);

  std::vector<std::string> classes_;
  TrainConfig config_;
  std::vector<uint32_t> feature_ids_;  // compact index -> hashed id
  std::unordered_map<uint32_t, uint32_t> feature_index_;
  std::vector<double> weights_;  // feature_ids_.size() x classes_.size()
  std::vector<double> bias_;
  std::vector<double> loss_history_;
};

// Fits the model by full-batch gradient descent. Every annotation (slot
// included) is one example. Throws Error when fewer than two classes occur.
LinearModel Train(const AnnotationSet &annotations, const Corpus &corpus,
                  const std::vector<std::string> &relations,
                  const TrainConfig &config);

// Predicts every corpus instance.
AnnotationSet PredictCorpus(const LinearModel &model, const Corpus &corpus,
                            EntityMode mode);

}  // namespace dsre

#endif  // DSRE_CLASSIFIER_H_
