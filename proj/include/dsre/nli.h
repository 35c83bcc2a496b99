#ifndef DSRE_NLI_H_
#define DSRE_NLI_H_

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace dsre {

// Distribution over entailment, neutrality and contradiction.
struct NliScore {
  double entail = 0;
  double neutral = 0;
  double contradict = 0;

  bool IsDistribution(double tolerance = 1e-9) const;
  bool operator==(const NliScore &) const = default;
};

struct NliPair {
  std::string premise;
  std::string hypothesis;
};

// Entailment scorer. Implementations must be safe to call from several
// threads at once.
class NliEngine {
 public:
  virtual ~NliEngine() = default;

  // One score per pair, in input order.
  virtual std::vector<NliScore> ScoreBatch(
      std::span<const NliPair> pairs) const = 0;

  // Throws Error when either side is empty.
  NliScore Score(const std::string &premise,
                 const std::string &hypothesis) const;
};

// Pure lexical stand-in for an NLI model. The hypothesis is reduced to its
// lowercased non-stop-word tokens; if those occur in the premise as an
// ordered subsequence the pair is "entailed".
class MockNliEngine : public NliEngine {
 public:
  static constexpr NliScore kEntailed{0.98, 0.01, 0.01};
  static constexpr NliScore kNotEntailed{0.02, 0.49, 0.49};

  std::vector<NliScore> ScoreBatch(
      std::span<const NliPair> pairs) const override;

  static bool Contains(const std::string &premise,
                       const std::string &hypothesis);
};

// Memoizes another engine and, when given a path, persists scores as JSON
// Lines so later runs can reuse them.
class CachedNliEngine : public NliEngine {
 public:
  CachedNliEngine(std::shared_ptr<const NliEngine> inner,
                  std::string cache_path);

  std::vector<NliScore> ScoreBatch(
      std::span<const NliPair> pairs) const override;

  size_t cached() const;

 private:
  std::shared_ptr<const NliEngine> inner_;
  std::string cache_path_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, NliScore> cache_;
};

enum class NliBackend { kMock, kRemote };

struct NliConfig {
  double tau = 0.95;
  NliBackend backend = NliBackend::kMock;
  int batch_size = 32;
  std::string remote_url;
  int max_retries = 3;
  double timeout_seconds = 30;
  std::string cache_path;  // empty: no cross-run cache

  // Throws ConfigError on out-of-range values.
  void Validate() const;
};

// Environment variable overriding the remote endpoint.
inline constexpr char kNliUrlEnv[] = "DSRE_NLI_URL";

// Builds the engine described by `config`, wrapping it in a cache when a
// cache path is set.
std::shared_ptr<const NliEngine> MakeNliEngine(const NliConfig &config);

}  // namespace dsre

#endif  // DSRE_NLI_H_
