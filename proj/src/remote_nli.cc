#include "dsre/remote_nli.h"

#include <chrono>
#include <thread>

#include "dsre/errors.h"
#include "httplib.h"
#include "json.hpp"

namespace dsre {

namespace {

std::unique_ptr<httplib::Client> Connect(const RemoteNliOptions &options) {
  auto client = std::make_unique<httplib::Client>(options.url);
  if (!client->is_valid()) {
    throw TransportError("invalid NLI endpoint URL: " + options.url);
  }
  auto secs = static_cast<time_t>(options.timeout_seconds);
  auto usecs = static_cast<time_t>(
      (options.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client->set_connection_timeout(secs, usecs);
  client->set_read_timeout(secs, usecs);
  client->set_write_timeout(secs, usecs);
  return client;
}

double Probability(const nlohmann::json &score, const char *field) {
  auto it = score.find(field);
  if (it == score.end() || !it->is_number()) {
    throw MalformedResponseError(std::string("NLI score lacks numeric '") +
                                 field + "'");
  }
  return it->get<double>();
}

}  // namespace

RemoteNliEngine::RemoteNliEngine(RemoteNliOptions options)
    : options_(std::move(options)) {
  if (options_.url.empty()) throw ConfigError("remote NLI URL is empty");
  if (options_.batch_size <= 0) {
    throw ConfigError("remote NLI batch size must be positive");
  }
}

std::vector<NliScore> RemoteNliEngine::ScoreBatch(
    std::span<const NliPair> pairs) const {
  std::vector<NliScore> out;
  out.reserve(pairs.size());
  for (size_t begin = 0; begin < pairs.size();
       begin += static_cast<size_t>(options_.batch_size)) {
    size_t n = std::min(pairs.size() - begin,
                        static_cast<size_t>(options_.batch_size));
    auto scores = PostChunk(pairs.subspan(begin, n));
    out.insert(out.end(), scores.begin(), scores.end());
  }
  return out;
}

std::vector<NliScore> RemoteNliEngine::PostChunk(
    std::span<const NliPair> chunk) const {
  nlohmann::json request;
  request["pairs"] = nlohmann::json::array();
  for (const auto &p : chunk) {
    if (p.premise.empty() || p.hypothesis.empty()) {
      throw Error("NLI premise and hypothesis must be non-empty");
    }
    request["pairs"].push_back({{"premise", p.premise},
                                {"hypothesis", p.hypothesis}});
  }
  const std::string body = request.dump();

  std::string failure;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(options_.retry_backoff_ms * attempt));
    }
    auto client = Connect(options_);
    auto res = client->Post("/nli", body, "application/json");
    if (!res) {
      failure = "POST /nli failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      failure = "POST /nli returned HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("POST /nli returned HTTP " +
                           std::to_string(res->status) + ": " + res->body);
    }

    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error &e) {
      throw MalformedResponseError(std::string("NLI reply is not JSON: ") +
                                   e.what());
    }
    if (!reply.is_object() || !reply.contains("scores") ||
        !reply["scores"].is_array()) {
      throw MalformedResponseError("NLI reply lacks a 'scores' array");
    }
    const auto &scores = reply["scores"];
    if (scores.size() != chunk.size()) {
      throw MalformedResponseError(
          "NLI reply has " + std::to_string(scores.size()) + " scores for " +
          std::to_string(chunk.size()) + " pairs");
    }
    std::vector<NliScore> out;
    out.reserve(scores.size());
    for (const auto &s : scores) {
      if (!s.is_object()) {
        throw MalformedResponseError("NLI score is not an object");
      }
      NliScore score{Probability(s, "entail"), Probability(s, "neutral"),
                     Probability(s, "contradict")};
      if (!score.IsDistribution(1e-6)) {
        throw DistributionError("NLI scores do not form a distribution: " +
                                s.dump());
      }
      double sum = score.entail + score.neutral + score.contradict;
      score.entail /= sum;
      score.neutral /= sum;
      score.contradict /= sum;
      out.push_back(score);
    }
    return out;
  }
  throw TransportError(failure + " (after " +
                       std::to_string(options_.max_retries + 1) +
                       " attempts)");
}

void RemoteNliEngine::CheckHealth() const {
  auto client = Connect(options_);
  auto res = client->Get("/health");
  if (!res) {
    throw TransportError("GET /health failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("GET /health returned HTTP " +
                         std::to_string(res->status));
  }
  try {
    auto reply = nlohmann::json::parse(res->body);
    if (reply.value("status", "") == "ok") return;
  } catch (const nlohmann::json::exception &) {
  }
  throw MalformedResponseError("unexpected /health reply: " + res->body);
}

}  // namespace dsre
