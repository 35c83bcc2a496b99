#include "dsre/pipeline.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "dsre/errors.h"
#include "dsre/evaluation.h"
#include "dsre/inference.h"
#include "dsre/io.h"
#include "dsre/noise_sim.h"
#include "dsre/screening.h"
#include "dsre/screening_server.h"
#include "json.hpp"

namespace dsre {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void CheckKeys(const json &obj, const std::string &section,
               const std::set<std::string> &allowed) {
  if (!obj.is_object()) {
    throw ConfigError("config section '" + section + "' must be an object");
  }
  for (const auto &[key, _] : obj.items()) {
    if (allowed.count(key) == 0) {
      throw ConfigError("unknown config key '" + section +
                        (section.empty() ? "" : ".") + key + "'");
    }
  }
}

template <typename T>
void Get(const json &obj, const char *key, T &out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception &) {
    throw ConfigError(std::string("config key '") + key +
                      "' has the wrong type");
  }
}

std::string Resolve(const std::string &base, const std::string &path) {
  if (path.empty() || base.empty() || fs::path(path).is_absolute()) {
    return path;
  }
  return (fs::path(base) / path).lexically_normal().string();
}

void Log(const std::string &line) { fmt::print(stderr, "{}\n", line); }

}  // namespace

PipelineConfig PipelineConfig::Load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJson(buffer.str(), fs::path(path).parent_path().string());
}

PipelineConfig PipelineConfig::FromJson(const std::string &text,
                                        const std::string &base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  CheckKeys(root, "",
            {"corpus", "kb", "schema", "gold", "test_corpus", "test_gold",
             "workdir", "ui_dir", "ds_source", "case_sensitive", "strategy",
             "batch", "host", "port", "fn_target", "seed", "sarv", "nli",
             "classifier"});
  PipelineConfig c;
  Get(root, "corpus", c.corpus);
  Get(root, "kb", c.kb);
  Get(root, "schema", c.schema);
  Get(root, "gold", c.gold);
  Get(root, "test_corpus", c.test_corpus);
  Get(root, "test_gold", c.test_gold);
  Get(root, "workdir", c.workdir);
  Get(root, "ui_dir", c.ui_dir);
  Get(root, "ds_source", c.ds_source);
  Get(root, "case_sensitive", c.case_sensitive);
  Get(root, "batch", c.batch);
  Get(root, "host", c.host);
  Get(root, "port", c.port);
  Get(root, "fn_target", c.fn_target);
  Get(root, "seed", c.seed);
  if (root.contains("strategy")) {
    std::string s;
    Get(root, "strategy", s);
    c.strategy = ParseStrategy(s);
  }

  if (root.contains("sarv")) {
    const json &s = root["sarv"];
    CheckKeys(s, "sarv",
              {"top_fraction", "max_pattern_tokens",
               "max_candidates_per_relation", "min_screening_frequency",
               "max_examples"});
    Get(s, "top_fraction", c.sarv.top_fraction);
    Get(s, "max_pattern_tokens", c.sarv.max_pattern_tokens);
    Get(s, "max_candidates_per_relation", c.sarv.max_candidates_per_relation);
    Get(s, "min_screening_frequency", c.sarv.min_screening_frequency);
    Get(s, "max_examples", c.sarv.max_examples);
  }
  if (root.contains("nli")) {
    const json &n = root["nli"];
    CheckKeys(n, "nli",
              {"backend", "tau", "batch_size", "remote_url", "max_retries",
               "timeout_seconds", "cache_path"});
    if (n.contains("backend")) {
      std::string b;
      Get(n, "backend", b);
      if (b == "mock") {
        c.nli.backend = NliBackend::kMock;
      } else if (b == "remote") {
        c.nli.backend = NliBackend::kRemote;
      } else {
        throw ConfigError("nli.backend must be mock or remote, got '" + b +
                          "'");
      }
    }
    Get(n, "tau", c.nli.tau);
    Get(n, "batch_size", c.nli.batch_size);
    Get(n, "remote_url", c.nli.remote_url);
    Get(n, "max_retries", c.nli.max_retries);
    Get(n, "timeout_seconds", c.nli.timeout_seconds);
    Get(n, "cache_path", c.nli.cache_path);
  }
  if (root.contains("classifier")) {
    const json &m = root["classifier"];
    CheckKeys(m, "classifier",
              {"mode", "hash_dim", "learning_rate", "epochs", "l2",
               "init_scale"});
    if (m.contains("mode")) {
      std::string mode;
      Get(m, "mode", mode);
      c.classifier.mode = ParseMode(mode);
    }
    Get(m, "hash_dim", c.classifier.hash_dim);
    Get(m, "learning_rate", c.classifier.learning_rate);
    Get(m, "epochs", c.classifier.epochs);
    Get(m, "l2", c.classifier.l2);
    Get(m, "init_scale", c.classifier.init_scale);
  }
  c.classifier.seed = c.seed;

  for (std::string *p : {&c.corpus, &c.kb, &c.schema, &c.gold, &c.test_corpus,
                         &c.test_gold, &c.workdir, &c.ui_dir,
                         &c.nli.cache_path}) {
    *p = Resolve(base_dir, *p);
  }
  return c;
}

void PipelineConfig::Validate() const {
  auto need = [](const std::string &path, const char *key) {
    if (path.empty()) throw ConfigError(std::string("config lacks '") + key + "'");
    if (!FileExists(path)) {
      throw ConfigError(std::string("config '") + key + "' points to missing file " +
                        path);
    }
  };
  auto optional = [](const std::string &path, const char *key) {
    if (!path.empty() && !FileExists(path)) {
      throw ConfigError(std::string("config '") + key + "' points to missing file " +
                        path);
    }
  };
  need(corpus, "corpus");
  need(schema, "schema");
  if (ds_source == "kb") {
    need(kb, "kb");
  } else if (ds_source == "simulated") {
    need(gold, "gold");
  } else {
    throw ConfigError("ds_source must be kb or simulated, got '" + ds_source +
                      "'");
  }
  optional(gold, "gold");
  optional(test_corpus, "test_corpus");
  optional(test_gold, "test_gold");
  if (workdir.empty()) throw ConfigError("config 'workdir' is empty");
  if (port < 0 || port > 65535) throw ConfigError("port out of range");
  if (!(fn_target >= 0 && fn_target <= 1)) {
    throw ConfigError("fn_target must be in [0, 1]");
  }
  sarv.Validate();
  nli.Validate();
  classifier.Validate();
}

WorkdirLock::WorkdirLock(const std::string &workdir) {
  fs::create_directories(workdir);
  std::string path = (fs::path(workdir) / artifacts::kLock).string();
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error("cannot open lock file " + path);
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error("work directory " + workdir +
                " is in use by another dsre command");
  }
}

WorkdirLock::~WorkdirLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  config_.classifier.seed = config_.seed;
  config_.Validate();
}

std::string Pipeline::Path(const std::string &name) const {
  return (fs::path(config_.workdir) / name).string();
}

std::string Pipeline::ModelPath(const std::string &data) const {
  return Path("model_" + data + ".json");
}

std::string Pipeline::MetricsPath(const std::string &data,
                                  const std::string &ext) const {
  return Path("metrics_" + data + "." + ext);
}

std::string Pipeline::TemplatePath(const std::string &relation) const {
  return (fs::path(config_.workdir) / artifacts::kTemplateDir /
          (RelationFileStem(relation) + ".json"))
      .string();
}

std::string Pipeline::ConsolidatedPath(Strategy strategy) const {
  return strategy == Strategy::kIPIN ? Path("ipin.jsonl") : Path("npin.jsonl");
}

std::string Pipeline::Require(const std::string &path) const {
  if (!FileExists(path)) throw MissingArtifactError(path);
  return path;
}

std::string Pipeline::TrainingPath(const std::string &data) const {
  if (data == "ds") return Path(artifacts::kDistant);
  if (data == "ipin") return ConsolidatedPath(Strategy::kIPIN);
  if (data == "npin") return ConsolidatedPath(Strategy::kNPIN);
  if (data == "simulated") return Path(artifacts::kSimulated);
  if (data == "gold") {
    if (config_.gold.empty()) throw ConfigError("config lacks 'gold'");
    return config_.gold;
  }
  throw ConfigError("training data must be ds, ipin, npin, simulated or gold, "
                    "got '" + data + "'");
}

const Corpus &Pipeline::corpus() {
  if (!corpus_) corpus_ = Corpus::Load(config_.corpus);
  return *corpus_;
}

const RelationSchema &Pipeline::schema() {
  if (!schema_) schema_ = RelationSchema::Load(config_.schema);
  return *schema_;
}

const NliEngine &Pipeline::engine() {
  if (!engine_) engine_ = MakeNliEngine(config_.nli);
  return *engine_;
}

void Pipeline::Annotate() {
  const auto ids = schema().ids();
  AnnotationSet ds;
  if (config_.ds_source == "simulated") {
    ds = AnnotationSet::Load(Require(Path(artifacts::kSimulated)));
    ds.set_source(Source::kDS);
  } else {
    ds = DistantAnnotate(corpus(), KnowledgeBase::Load(config_.kb), ids,
                         {config_.case_sensitive});
  }
  ds.Validate(corpus());
  ds.Save(Path(artifacts::kDistant));
  size_t positives = 0;
  for (const auto &e : ds.entries()) positives += e.label != kNA;
  Log(fmt::format("annotate: {} labels, {} positive", ds.size(), positives));
}

void Pipeline::Mine() {
  AnnotationSet ds = AnnotationSet::Load(Require(Path(artifacts::kDistant)));
  std::vector<PatternSet> sets;
  for (const auto &id : schema().ids()) {
    sets.push_back(MinePatterns(ds, corpus(), id, config_.sarv.max_examples));
    Log(fmt::format("mine: {}: {} patterns", id, sets.back().patterns.size()));
  }
  SavePatternSets(Path(artifacts::kPatternsInitial), sets);
}

void Pipeline::Group() {
  auto initial = LoadPatternSets(Require(Path(artifacts::kPatternsInitial)));
  const double tau = config_.nli.tau;
  std::vector<PatternSet> grouped_sets, pruned_sets;
  ordered_json stats = ordered_json::object();
  for (const auto &rel : schema().relations()) {
    PatternSet mined;
    mined.relation = rel.id;
    if (auto it = initial.find(rel.id); it != initial.end()) mined = it->second;
    PatternFillers fillers = PatternFillers::ForRelation(schema(), rel.id);
    PatternSet filtered = FilterPatterns(mined, config_.sarv);
    PatternSet grouped = GroupPatterns(filtered, engine(), tau, fillers);
    PatternSet pruned =
        PruneByGeneralTemplate(grouped, rel.general, engine(), tau, fillers);
    size_t eligible = 0;
    for (const auto &p : pruned.patterns) {
      eligible += p.frequency >= config_.sarv.min_screening_frequency;
    }
    stats[rel.id] = {{"initial", mined.patterns.size()},
                     {"filtered", filtered.patterns.size()},
                     {"grouped", grouped.patterns.size()},
                     {"pruned", pruned.patterns.size()},
                     {"eligible", eligible}};
    Log(fmt::format("group: {}: {} -> {} -> {} -> {} (eligible {})", rel.id,
                    mined.patterns.size(), filtered.patterns.size(),
                    grouped.patterns.size(), pruned.patterns.size(), eligible));
    grouped_sets.push_back(std::move(grouped));
    pruned_sets.push_back(std::move(pruned));
  }
  SavePatternSets(Path(artifacts::kPatternsGrouped), grouped_sets);
  SavePatternSets(Path(artifacts::kPatternsPruned), pruned_sets);
  WriteFileAtomic(Path(artifacts::kSarvStats), stats.dump(2) + "\n");
}

void Pipeline::Screen() {
  auto pruned = LoadPatternSets(Require(Path(artifacts::kPatternsPruned)));
  fs::create_directories(Path(artifacts::kTemplateDir));
  if (config_.batch) {
    for (const auto &rel : schema().relations()) {
      TemplateSet set{rel.id, {rel.general}};
      set.Save(TemplatePath(rel.id));
    }
    Log(fmt::format("screen: batch mode, {} general templates written",
                    schema().relations().size()));
    return;
  }

  ScreeningServer::Options options;
  options.ui_dir = config_.ui_dir;
  options.template_dir = Path(artifacts::kTemplateDir);
  ScreeningServer server(corpus(), options);
  for (const auto &rel : schema().relations()) {
    PatternSet set;
    set.relation = rel.id;
    set.stage = PatternStage::kPruned;
    if (auto it = pruned.find(rel.id); it != pruned.end()) set = it->second;
    server.AddRelation(
        ScreeningSession(set, config_.sarv, Path(artifacts::kJournal)),
        rel.general);
  }
  int port = server.Bind(config_.host, config_.port);
  Log(fmt::format("screen: review UI at http://{}:{}/", config_.host, port));
  server.Serve();
  for (const auto &set : server.TemplateSetsSnapshot()) {
    set.Save(TemplatePath(set.relation));
    Log(fmt::format("screen: {}: {} templates", set.relation,
                    set.templates.size()));
  }
}

void Pipeline::Infer() {
  TemplateSets sets;
  for (const auto &id : schema().ids()) {
    sets.emplace(id, TemplateSet::Load(Require(TemplatePath(id))));
  }
  AnnotationSet is =
      InferCorpus(corpus(), schema(), sets, engine(), config_.nli);
  is.Save(Path(artifacts::kIndirect));
  size_t positives = 0;
  for (const auto &e : is.entries()) positives += e.label != kNA;
  Log(fmt::format("infer: {} labels, {} positive", is.size(), positives));
}

void Pipeline::Consolidate() {
  AnnotationSet ds = AnnotationSet::Load(Require(Path(artifacts::kDistant)));
  AnnotationSet is = AnnotationSet::Load(Require(Path(artifacts::kIndirect)));
  Consolidated out = dsre::Consolidate(config_.strategy, ds, is);
  std::string path = ConsolidatedPath(config_.strategy);
  out.annotations.Save(path);
  std::string stem = path.substr(0, path.size() - std::string(".jsonl").size());
  WriteFileAtomic(stem + "_report.json", out.report.ToJson());
  Log(fmt::format("consolidate: {}: {} of {} labels kept",
                  StrategyName(config_.strategy), out.annotations.size(),
                  ds.size()));
}

void Pipeline::Simulate() {
  if (config_.gold.empty()) throw ConfigError("simulate needs 'gold' in the config");
  AnnotationSet gold = AnnotationSet::Load(config_.gold);
  gold.Validate(corpus());
  FnInjection fn = InjectFalseNegatives(gold, corpus(), config_.fn_target);
  AnnotationSet noisy = InjectFalsePositives(fn.annotations, corpus());
  noisy.Save(Path(artifacts::kSimulated));
  NoiseReport report = NoiseStats(noisy, gold);
  ordered_json out;
  out["fn_target"] = config_.fn_target;
  out["fn_threshold"] = fn.threshold;
  out["fn_relabeled"] = fn.relabeled;
  out["fn_injected_rate"] = fn.fn_rate;
  out["noise"] = json::parse(report.ToJson());
  WriteFileAtomic(Path(artifacts::kSimulationReport), out.dump(2) + "\n");
  Log(fmt::format("simulate: threshold {}, {} positives relabeled NA, "
                  "FP rate {:.2f}%, FN rate {:.2f}%",
                  fn.threshold, fn.relabeled, 100 * report.fp_rate(),
                  100 * report.fn_rate()));
}

void Pipeline::Train(const std::string &data) {
  std::string path = TrainingPath(data);
  AnnotationSet train = AnnotationSet::Load(data == "gold" ? path : Require(path));
  LinearModel model = dsre::Train(train, corpus(), schema().ids(),
                                  config_.classifier);
  model.Save(ModelPath(data));
  Log(fmt::format("train: {}: {} examples, {} features, loss {:.4f} -> {:.4f}",
                  data, train.size(), model.num_features(),
                  model.loss_history().front(), model.loss_history().back()));
}

void Pipeline::Eval(const std::string &data) {
  TrainingPath(data);
  LinearModel model = LinearModel::Load(Require(ModelPath(data)));
  if (config_.test_corpus.empty() || config_.test_gold.empty()) {
    throw ConfigError("eval needs 'test_corpus' and 'test_gold' in the config");
  }
  Corpus test = Corpus::Load(config_.test_corpus);
  AnnotationSet gold = AnnotationSet::Load(config_.test_gold);
  AnnotationSet pred = PredictCorpus(model, test, model.config().mode);
  Metrics metrics = Evaluate(pred, gold);
  WriteFileAtomic(MetricsPath(data, "json"), MetricsJson(metrics));
  WriteFileAtomic(MetricsPath(data, "txt"), MetricsTable(metrics));
  for (const auto &w : metrics.warnings) Log("eval: warning: " + w);
  Log(fmt::format("eval: {}: P {} R {} F1 {}", data, Percent(metrics.precision),
                  Percent(metrics.recall), Percent(metrics.f1)));
}

void Pipeline::Run() {
  if (config_.ds_source == "simulated") Simulate();
  Annotate();
  Mine();
  Group();
  Screen();
  Infer();
  Consolidate();
  const std::string consolidated(StrategyName(config_.strategy));
  const bool evaluate = !config_.test_corpus.empty() && !config_.test_gold.empty();
  std::string summary;
  for (const std::string &data : {std::string("ds"), consolidated}) {
    Train(data);
    if (!evaluate) continue;
    Eval(data);
    auto metrics = ReadJsonFile(MetricsPath(data, "json"));
    summary += fmt::format("{:<6} P {:>6}  R {:>6}  F1 {:>6}\n", data,
                           Percent(metrics["precision"].get<double>()),
                           Percent(metrics["recall"].get<double>()),
                           Percent(metrics["f1"].get<double>()));
  }
  if (!config_.gold.empty()) {
    AnnotationSet gold = AnnotationSet::Load(config_.gold);
    std::vector<std::pair<std::string, NoiseReport>> rows;
    for (const std::string &data : {std::string("ds"), consolidated}) {
      rows.emplace_back(data, NoiseStats(AnnotationSet::Load(TrainingPath(data)),
                                         gold));
    }
    summary += "\n" + NoiseTable(rows);
  }
  WriteFileAtomic(Path(artifacts::kSummary), summary);
}

}  // namespace dsre
