#ifndef DSRE_PIPELINE_H_
#define DSRE_PIPELINE_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dsre/annotation.h"
#include "dsre/classifier.h"
#include "dsre/consolidation.h"
#include "dsre/corpus.h"
#include "dsre/nli.h"
#include "dsre/sarv.h"
#include "dsre/schema.h"

namespace dsre {

// Artifact file names inside the work directory.
namespace artifacts {
inline constexpr char kDistant[] = "ds.jsonl";
inline constexpr char kPatternsInitial[] = "patterns_initial.jsonl";
inline constexpr char kPatternsGrouped[] = "patterns_grouped.jsonl";
inline constexpr char kPatternsPruned[] = "patterns_pruned.jsonl";
inline constexpr char kSarvStats[] = "sarv_stats.json";
inline constexpr char kTemplateDir[] = "templates";
inline constexpr char kJournal[] = "screening_journal.jsonl";
inline constexpr char kIndirect[] = "is.jsonl";
inline constexpr char kSimulated[] = "simulated.jsonl";
inline constexpr char kSimulationReport[] = "simulation.json";
inline constexpr char kSummary[] = "summary.txt";
inline constexpr char kLock[] = ".dsre.lock";
}  // namespace artifacts

struct PipelineConfig {
  // Input paths. Relative paths in a config file resolve against the
  // file's directory.
  std::string corpus;
  std::string kb;
  std::string schema;
  std::string gold;         // optional: training-corpus gold labels
  std::string test_corpus;  // needed by eval
  std::string test_gold;    // needed by eval
  std::string workdir = "work";
  std::string ui_dir;

  // "kb" annotates with the knowledge base; "simulated" uses the output of
  // the simulate stage as the distant labels.
  std::string ds_source = "kb";
  bool case_sensitive = true;
  Strategy strategy = Strategy::kIPIN;
  bool batch = false;
  std::string host = "127.0.0.1";
  int port = 8080;
  double fn_target = 0.05;
  uint64_t seed = 13;

  SarvConfig sarv;
  NliConfig nli;
  TrainConfig classifier;

  static PipelineConfig Load(const std::string &path);
  // Unknown keys are rejected. `base_dir` anchors relative paths.
  static PipelineConfig FromJson(const std::string &json,
                                 const std::string &base_dir = "");
  // Throws ConfigError on bad values or missing input files.
  void Validate() const;
};

// Holds an exclusive lock on the work directory for its lifetime. Throws
// Error when another process holds it.
class WorkdirLock {
 public:
  explicit WorkdirLock(const std::string &workdir);
  ~WorkdirLock();
  WorkdirLock(const WorkdirLock &) = delete;
  WorkdirLock &operator=(const WorkdirLock &) = delete;

 private:
  int fd_ = -1;
};

// The staged pipeline. Each stage reads its inputs from the work directory
// and fails with MissingArtifactError when an earlier stage has not run.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  // Replaces the engine built from the NLI config.
  void set_engine(std::shared_ptr<const NliEngine> engine) {
    engine_ = std::move(engine);
  }

  void Annotate();
  void Mine();
  // Filter, group and prune.
  void Group();
  // Batch mode keeps only the general templates; otherwise serves the
  // review UI until every relation is finalized or the session is closed.
  void Screen();
  void Infer();
  void Consolidate();
  void Simulate();
  // `data` is one of ds, ipin, npin, simulated, gold.
  void Train(const std::string &data);
  void Eval(const std::string &data);
  // annotate, mine, group, screen, infer, consolidate, then train and eval
  // on both the distant labels and the consolidated labels.
  void Run();

  std::string Path(const std::string &name) const;
  std::string ModelPath(const std::string &data) const;
  std::string MetricsPath(const std::string &data,
                          const std::string &ext) const;
  std::string TemplatePath(const std::string &relation) const;
  std::string ConsolidatedPath(Strategy strategy) const;

  const PipelineConfig &config() const { return config_; }

 private:
  const Corpus &corpus();
  const RelationSchema &schema();
  const NliEngine &engine();
  std::string Require(const std::string &path) const;
  std::string TrainingPath(const std::string &data) const;

  PipelineConfig config_;
  std::optional<Corpus> corpus_;
  std::optional<RelationSchema> schema_;
  std::shared_ptr<const NliEngine> engine_;
};

}  // namespace dsre

#endif  // DSRE_PIPELINE_H_
