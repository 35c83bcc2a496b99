#ifndef DSRE_REMOTE_NLI_H_
#define DSRE_REMOTE_NLI_H_

#include <span>
#include <string>
#include <vector>

#include "dsre/nli.h"

namespace dsre {

struct RemoteNliOptions {
  std::string url;  // e.g. http://localhost:8000
  int batch_size = 32;
  int max_retries = 3;
  double timeout_seconds = 30;
  int retry_backoff_ms = 100;
};

// Client for the NLI sidecar:
//   POST /nli  {"pairs":[{"premise","hypothesis"}...]}
//           -> {"scores":[{"entail","neutral","contradict"}...]}
//   GET /health -> {"status":"ok"}
// Pairs are sent in chunks of batch_size. Connection failures and 5xx
// responses are retried up to max_retries times; everything else fails at
// once. Each call opens its own connection, so concurrent callers get
// parallel in-flight batches.
class RemoteNliEngine : public NliEngine {
 public:
  explicit RemoteNliEngine(RemoteNliOptions options);

  std::vector<NliScore> ScoreBatch(
      std::span<const NliPair> pairs) const override;

  // Throws TransportError or MalformedResponseError unless the service
  // answers {"status":"ok"}.
  void CheckHealth() const;

  const RemoteNliOptions &options() const { return options_; }

 private:
  std::vector<NliScore> PostChunk(std::span<const NliPair> chunk) const;

  RemoteNliOptions options_;
};

}  // namespace dsre

#endif  // DSRE_REMOTE_NLI_H_
