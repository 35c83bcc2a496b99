#include "dsre/nli.h"

#include <cmath>
#include <fstream>

#include "dsre/errors.h"
#include "dsre/io.h"
#include "dsre/remote_nli.h"
#include "dsre/text.h"

namespace dsre {

bool NliScore::IsDistribution(double tolerance) const {
  for (double p : {entail, neutral, contradict}) {
    if (!std::isfinite(p) || p < 0 || p > 1) return false;
  }
  return std::abs(entail + neutral + contradict - 1.0) <= tolerance;
}

NliScore NliEngine::Score(const std::string &premise,
                          const std::string &hypothesis) const {
  if (premise.empty() || hypothesis.empty()) {
    throw Error("NLI premise and hypothesis must be non-empty");
  }
  NliPair pair{premise, hypothesis};
  return ScoreBatch(std::span<const NliPair>(&pair, 1)).at(0);
}

bool MockNliEngine::Contains(const std::string &premise,
                             const std::string &hypothesis) {
  std::vector<std::string> needle = ContentTokens(hypothesis);
  std::vector<std::string> hay = NormalizedTokens(premise);
  size_t pos = 0;
  for (const auto &tok : needle) {
    while (pos < hay.size() && hay[pos] != tok) ++pos;
    if (pos == hay.size()) return false;
    ++pos;
  }
  return true;
}

std::vector<NliScore> MockNliEngine::ScoreBatch(
    std::span<const NliPair> pairs) const {
  std::vector<NliScore> out;
  out.reserve(pairs.size());
  for (const auto &p : pairs) {
    if (p.premise.empty() || p.hypothesis.empty()) {
      throw Error("NLI premise and hypothesis must be non-empty");
    }
    out.push_back(Contains(p.premise, p.hypothesis) ? kEntailed
                                                    : kNotEntailed);
  }
  return out;
}

namespace {

std::string CacheKey(const NliPair &pair) {
  // Unit separator keeps the two fields apart.
  return pair.premise + '\x1f' + pair.hypothesis;
}

}  // namespace

CachedNliEngine::CachedNliEngine(std::shared_ptr<const NliEngine> inner,
                                 std::string cache_path)
    : inner_(std::move(inner)), cache_path_(std::move(cache_path)) {
  if (cache_path_.empty() || !FileExists(cache_path_)) return;
  ForEachJsonLine(cache_path_, [&](int, const nlohmann::json &row) {
    NliPair pair{row.at("premise"), row.at("hypothesis")};
    cache_[CacheKey(pair)] = {row.at("entail"), row.at("neutral"),
                              row.at("contradict")};
  });
}

size_t CachedNliEngine::cached() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.size();
}

std::vector<NliScore> CachedNliEngine::ScoreBatch(
    std::span<const NliPair> pairs) const {
  std::vector<NliScore> out(pairs.size());
  std::vector<NliPair> missing;
  std::vector<size_t> missing_index;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (size_t i = 0; i < pairs.size(); ++i) {
      auto it = cache_.find(CacheKey(pairs[i]));
      if (it != cache_.end()) {
        out[i] = it->second;
      } else {
        missing.push_back(pairs[i]);
        missing_index.push_back(i);
      }
    }
  }
  if (missing.empty()) return out;

  std::vector<NliScore> fresh = inner_->ScoreBatch(missing);
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream journal;
  if (!cache_path_.empty()) journal.open(cache_path_, std::ios::app);
  for (size_t k = 0; k < missing.size(); ++k) {
    out[missing_index[k]] = fresh[k];
    if (cache_.emplace(CacheKey(missing[k]), fresh[k]).second && journal) {
      nlohmann::ordered_json row;
      row["premise"] = missing[k].premise;
      row["hypothesis"] = missing[k].hypothesis;
      row["entail"] = fresh[k].entail;
      row["neutral"] = fresh[k].neutral;
      row["contradict"] = fresh[k].contradict;
      journal << row.dump() << '\n';
    }
  }
  return out;
}

void NliConfig::Validate() const {
  if (!(tau > 0 && tau <= 1)) {
    throw ConfigError("nli.tau must be in (0, 1], got " + std::to_string(tau));
  }
  if (batch_size <= 0) throw ConfigError("nli.batch_size must be positive");
  if (max_retries < 0) throw ConfigError("nli.max_retries must be >= 0");
  if (backend == NliBackend::kRemote && remote_url.empty()) {
    throw ConfigError("remote NLI backend needs a URL (--remote-url or " +
                      std::string(kNliUrlEnv) + ")");
  }
}

std::shared_ptr<const NliEngine> MakeNliEngine(const NliConfig &config) {
  config.Validate();
  std::shared_ptr<const NliEngine> engine;
  if (config.backend == NliBackend::kMock) {
    engine = std::make_shared<MockNliEngine>();
  } else {
    RemoteNliOptions options;
    options.url = config.remote_url;
    options.batch_size = config.batch_size;
    options.max_retries = config.max_retries;
    options.timeout_seconds = config.timeout_seconds;
    engine = std::make_shared<RemoteNliEngine>(options);
  }
  if (!config.cache_path.empty()) {
    engine = std::make_shared<CachedNliEngine>(engine, config.cache_path);
  }
  return engine;
}

}  // namespace dsre
