#include "dsre/classifier.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>

#include "dsre/errors.h"
#include "dsre/io.h"
#include "json.hpp"

namespace dsre {

namespace {

constexpr int kModelVersion = 1;

uint64_t Fnv1a(std::string_view text) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string Lower(std::string text) {
  for (char &c : text) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return text;
}

std::string DistanceBucket(int gap) {
  if (gap <= 2) return std::to_string(gap);
  if (gap <= 4) return "3-4";
  if (gap <= 8) return "5-8";
  if (gap <= 16) return "9-16";
  return "17+";
}

// Token stream plus the stream ranges occupied by the two entities.
struct Stream {
  std::vector<std::string> tokens;
  Span subj;
  Span obj;
};

Stream BuildStream(const Instance &instance, const Sentence &sentence,
                   EntityMode mode) {
  const int n = static_cast<int>(sentence.tokens.size());
  // owner: -1 plain token, 0 subject, 1 object, 2+k other mention k.
  std::vector<int> owner(n, -1);
  auto claim = [&](Span span, int who) {
    for (int i = span.start; i < span.end; ++i) {
      if (owner[i] != -1) return false;
    }
    for (int i = span.start; i < span.end; ++i) owner[i] = who;
    return true;
  };
  claim(instance.subj.span, 0);
  claim(instance.obj.span, 1);
  for (size_t k = 0; k < sentence.mentions.size(); ++k) {
    claim(sentence.mentions[k].span, 2 + static_cast<int>(k));
  }

  Stream out;
  for (int i = 0; i < n;) {
    int who = owner[i];
    if (who == -1) {
      out.tokens.push_back(sentence.tokens[i]);
      ++i;
      continue;
    }
    int end = i;
    while (end < n && owner[end] == who) ++end;
    int begin_pos = static_cast<int>(out.tokens.size());
    if (who <= 1) {
      const EntityMention &m = who == 0 ? instance.subj : instance.obj;
      const char *role = who == 0 ? "subj" : "obj";
      if (mode == EntityMode::kEM) {
        out.tokens.push_back(std::string(who == 0 ? "SUBJ-" : "OBJ-") + m.ner);
      } else {
        out.tokens.push_back(std::string("<") + role + ":" + m.ner + ">");
        for (int j = i; j < end; ++j) out.tokens.push_back(sentence.tokens[j]);
        out.tokens.push_back(std::string("</") + role + ">");
      }
      Span range{begin_pos, static_cast<int>(out.tokens.size())};
      (who == 0 ? out.subj : out.obj) = range;
    } else if (mode == EntityMode::kEM) {
      out.tokens.push_back(sentence.mentions[who - 2].ner);
    } else {
      for (int j = i; j < end; ++j) out.tokens.push_back(sentence.tokens[j]);
    }
    i = end;
  }
  return out;
}

}  // namespace

std::string_view ModeName(EntityMode mode) {
  return mode == EntityMode::kEM ? "em" : "tem";
}

EntityMode ParseMode(std::string_view name) {
  if (name == "em" || name == "EM") return EntityMode::kEM;
  if (name == "tem" || name == "TEM") return EntityMode::kTEM;
  throw ConfigError("entity mode must be em or tem, got '" +
                    std::string(name) + "'");
}

std::vector<std::string> EntityTokenStream(const Instance &instance,
                                           const Sentence &sentence,
                                           EntityMode mode) {
  return BuildStream(instance, sentence, mode).tokens;
}

FeatureVector Featurize(const Instance &instance, const Sentence &sentence,
                        EntityMode mode, uint32_t dim) {
  if (instance.subj.ner.empty() || instance.obj.ner.empty()) {
    throw Error("instance " + instance.key().ToString() +
                " lacks an NER type");
  }
  if (dim == 0) throw ConfigError("feature hash dimension must be positive");
  Stream stream = BuildStream(instance, sentence, mode);
  std::vector<std::string> toks;
  toks.reserve(stream.tokens.size());
  for (const auto &t : stream.tokens) toks.push_back(Lower(t));

  std::map<uint32_t, double> counts;
  auto add = [&](const std::string &feature) {
    counts[static_cast<uint32_t>(Fnv1a(feature) % dim)] += 1.0;
  };

  for (const auto &t : toks) add("u:" + t);
  add("b:<s> " + toks.front());
  for (size_t i = 0; i + 1 < toks.size(); ++i) {
    add("b:" + toks[i] + " " + toks[i + 1]);
  }
  add("b:" + toks.back() + " </s>");

  const bool subj_first = stream.subj.start < stream.obj.start;
  const Span &first = subj_first ? stream.subj : stream.obj;
  const Span &second = subj_first ? stream.obj : stream.subj;
  std::string between;
  for (int i = first.end; i < second.start; ++i) {
    add("m:" + toks[i]);
    between += toks[i] + " ";
  }
  if (second.start - first.end <= 6) add("p:" + between);

  add("t:" + instance.subj.ner + "|" + instance.obj.ner);
  add(std::string("o:") + (subj_first ? "subj-first" : "obj-first"));
  add("d:" + DistanceBucket(second.start - first.end));

  double norm = 0;
  for (const auto &[_, v] : counts) norm += v * v;
  norm = std::sqrt(norm);
  FeatureVector out;
  out.entries.reserve(counts.size());
  for (const auto &[id, v] : counts) out.entries.emplace_back(id, v / norm);
  return out;
}

void TrainConfig::Validate() const {
  if (hash_dim == 0) throw ConfigError("classifier.hash_dim must be positive");
  if (!(learning_rate > 0)) {
    throw ConfigError("classifier.learning_rate must be positive");
  }
  if (epochs <= 0) throw ConfigError("classifier.epochs must be positive");
  if (l2 < 0) throw ConfigError("classifier.l2 must be >= 0");
  if (init_scale < 0) throw ConfigError("classifier.init_scale must be >= 0");
}

SoftmaxObjective::SoftmaxObjective(const std::vector<Example> &examples,
                                   size_t num_features, size_t num_classes,
                                   double l2)
    : examples_(examples),
      num_features_(num_features),
      num_classes_(num_classes),
      l2_(l2) {}

double SoftmaxObjective::Loss(const std::vector<double> &params) const {
  return LossAndGradient(params, nullptr);
}

double SoftmaxObjective::LossAndGradient(const std::vector<double> &params,
                                         std::vector<double> *gradient) const {
  const size_t k = num_classes_;
  const double *w = params.data();
  const double *b = params.data() + num_features_ * k;
  if (gradient != nullptr) gradient->assign(params.size(), 0.0);

  std::vector<double> z(k);
  double loss = 0;
  for (const auto &ex : examples_) {
    for (size_t c = 0; c < k; ++c) z[c] = b[c];
    for (const auto &[f, v] : ex.x) {
      for (size_t c = 0; c < k; ++c) z[c] += v * w[f * k + c];
    }
    double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0;
    for (size_t c = 0; c < k; ++c) {
      z[c] = std::exp(z[c] - zmax);
      sum += z[c];
    }
    loss += -std::log(z[ex.y] / sum);
    if (gradient == nullptr) continue;
    double *gw = gradient->data();
    double *gb = gradient->data() + num_features_ * k;
    for (size_t c = 0; c < k; ++c) {
      double delta = z[c] / sum - (static_cast<int>(c) == ex.y ? 1.0 : 0.0);
      gb[c] += delta;
      for (const auto &[f, v] : ex.x) gw[f * k + c] += v * delta;
    }
  }

  const double n = examples_.empty() ? 1.0 : static_cast<double>(examples_.size());
  loss /= n;
  double reg = 0;
  for (size_t i = 0; i < num_features_ * k; ++i) reg += w[i] * w[i];
  loss += 0.5 * l2_ * reg;
  if (gradient != nullptr) {
    for (auto &g : *gradient) g /= n;
    for (size_t i = 0; i < num_features_ * k; ++i) {
      (*gradient)[i] += l2_ * w[i];
    }
  }
  return loss;
}

std::vector<double> LinearModel::Scores(const FeatureVector &features) const {
  const size_t k = classes_.size();
  std::vector<double> z = bias_;
  for (const auto &[id, v] : features.entries) {
    auto it = feature_index_.find(id);
    if (it == feature_index_.end()) continue;
    const double *row = weights_.data() + static_cast<size_t>(it->second) * k;
    for (size_t c = 0; c < k; ++c) z[c] += v * row[c];
  }
  return z;
}

std::string LinearModel::PredictFeatures(const FeatureVector &features) const {
  std::vector<double> z = Scores(features);
  size_t best = 0;
  for (size_t c = 1; c < z.size(); ++c) {
    if (z[c] > z[best]) best = c;
  }
  return classes_[best];
}

std::string LinearModel::Predict(const Instance &instance,
                                 const Sentence &sentence,
                                 EntityMode mode) const {
  if (mode != config_.mode) {
    throw ConfigError("model was trained with " +
                      std::string(ModeName(config_.mode)) +
                      " entities, asked to predict with " +
                      std::string(ModeName(mode)));
  }
  return PredictFeatures(Featurize(instance, sentence, mode, config_.hash_dim));
}

void LinearModel::Save(const std::string &path) const {
  nlohmann::ordered_json out;
  out["format"] = "dsre-linear-model";
  out["version"] = kModelVersion;
  out["config"] = {{"mode", ModeName(config_.mode)},
                   {"hash_dim", config_.hash_dim},
                   {"learning_rate", config_.learning_rate},
                   {"epochs", config_.epochs},
                   {"l2", config_.l2},
                   {"seed", config_.seed},
                   {"init_scale", config_.init_scale}};
  out["classes"] = classes_;
  out["bias"] = bias_;
  out["loss_history"] = loss_history_;
  auto features = nlohmann::ordered_json::array();
  const size_t k = classes_.size();
  for (size_t f = 0; f < feature_ids_.size(); ++f) {
    std::vector<double> row(weights_.begin() + f * k,
                            weights_.begin() + (f + 1) * k);
    features.push_back({{"id", feature_ids_[f]}, {"w", row}});
  }
  out["features"] = features;
  WriteFileAtomic(path, out.dump() + "\n");
}

LinearModel LinearModel::Load(const std::string &path) {
  auto in = ReadJsonFile(path);
  LinearModel model;
  try {
    if (in.at("format") != "dsre-linear-model" ||
        in.at("version") != kModelVersion) {
      throw ParseError(path, 0, "unsupported model format");
    }
    const auto &cfg = in.at("config");
    model.config_.mode = ParseMode(cfg.at("mode").get<std::string>());
    model.config_.hash_dim = cfg.at("hash_dim");
    model.config_.learning_rate = cfg.at("learning_rate");
    model.config_.epochs = cfg.at("epochs");
    model.config_.l2 = cfg.at("l2");
    model.config_.seed = cfg.at("seed");
    model.config_.init_scale = cfg.at("init_scale");
    model.classes_ = in.at("classes").get<std::vector<std::string>>();
    model.bias_ = in.at("bias").get<std::vector<double>>();
    model.loss_history_ = in.at("loss_history").get<std::vector<double>>();
    const size_t k = model.classes_.size();
    if (model.bias_.size() != k) throw ParseError(path, 0, "bias size mismatch");
    for (const auto &f : in.at("features")) {
      auto row = f.at("w").get<std::vector<double>>();
      if (row.size() != k) throw ParseError(path, 0, "weight row size mismatch");
      uint32_t id = f.at("id");
      model.feature_index_[id] = static_cast<uint32_t>(model.feature_ids_.size());
      model.feature_ids_.push_back(id);
      model.weights_.insert(model.weights_.end(), row.begin(), row.end());
    }
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(path, 0, e.what());
  }
  return model;
}

LinearModel Train(const AnnotationSet &annotations, const Corpus &corpus,
                  const std::vector<std::string> &relations,
                  const TrainConfig &config) {
  config.Validate();
  LinearModel model;
  model.config_ = config;
  model.classes_.emplace_back(kNA);
  for (const auto &r : relations) model.classes_.push_back(r);
  const size_t k = model.classes_.size();

  std::vector<FeatureVector> features;
  std::vector<int> labels;
  for (const auto &e : annotations.entries()) {
    auto it = std::find(model.classes_.begin(), model.classes_.end(), e.label);
    if (it == model.classes_.end()) {
      throw ConfigError("training label '" + e.label + "' is not a relation");
    }
    const Instance *inst = corpus.FindInstance(e.key);
    if (inst == nullptr) {
      throw Error("training annotation for unknown instance " +
                  e.key.ToString());
    }
    features.push_back(
        Featurize(*inst, corpus.SentenceOf(*inst), config.mode, config.hash_dim));
    labels.push_back(static_cast<int>(it - model.classes_.begin()));
  }
  std::vector<int> distinct = labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) {
    throw Error("training data needs at least two classes, found " +
                std::to_string(distinct.size()));
  }

  for (const auto &fv : features) {
    for (const auto &[id, _] : fv.entries) model.feature_index_.emplace(id, 0);
  }
  for (const auto &[id, _] : model.feature_index_) model.feature_ids_.push_back(id);
  std::sort(model.feature_ids_.begin(), model.feature_ids_.end());
  for (size_t i = 0; i < model.feature_ids_.size(); ++i) {
    model.feature_index_[model.feature_ids_[i]] = static_cast<uint32_t>(i);
  }

  std::vector<Example> examples(features.size());
  for (size_t i = 0; i < features.size(); ++i) {
    for (const auto &[id, v] : features[i].entries) {
      examples[i].x.emplace_back(model.feature_index_.at(id), v);
    }
    examples[i].y = labels[i];
  }

  const size_t nf = model.feature_ids_.size();
  SoftmaxObjective objective(examples, nf, k, config.l2);
  std::vector<double> params(objective.num_params(), 0.0);
  std::mt19937_64 rng(config.seed);
  for (size_t i = 0; i < nf * k; ++i) {
    // Top 53 bits -> [0, 1), mapped to [-init_scale, init_scale).
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    params[i] = (2 * u - 1) * config.init_scale;
  }

  std::vector<double> gradient;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    model.loss_history_.push_back(objective.LossAndGradient(params, &gradient));
    for (size_t i = 0; i < params.size(); ++i) {
      params[i] -= config.learning_rate * gradient[i];
    }
  }
  model.loss_history_.push_back(objective.Loss(params));

  model.weights_.assign(params.begin(), params.begin() + nf * k);
  model.bias_.assign(params.begin() + nf * k, params.end());
  return model;
}

AnnotationSet PredictCorpus(const LinearModel &model, const Corpus &corpus,
                            EntityMode mode) {
  AnnotationSet out(Source::kPredicted);
  for (const auto &inst : corpus.instances()) {
    out.Add(inst.key(), model.Predict(inst, corpus.SentenceOf(inst), mode));
  }
  return out;
}

}  // namespace dsre
