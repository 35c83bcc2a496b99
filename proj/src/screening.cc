#include "dsre/screening.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>

#include "dsre/errors.h"
#include "dsre/io.h"

namespace dsre {

namespace {

std::string UtcTimestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view DecisionName(Decision decision) {
  return decision == Decision::kAccept ? "accept" : "reject";
}

Decision ParseDecision(std::string_view name) {
  if (name == "accept") return Decision::kAccept;
  if (name == "reject") return Decision::kReject;
  throw Error("decision must be 'accept' or 'reject', got '" +
              std::string(name) + "'");
}

ScreeningSession::ScreeningSession(const PatternSet &pruned,
                                   const SarvConfig &config,
                                   std::string journal_path)
    : initialized_(true),
      relation_(pruned.relation),
      journal_path_(std::move(journal_path)) {
  config.Validate();
  for (const auto &p : pruned.patterns) {
    if (p.frequency >= config.min_screening_frequency) {
      candidates_.push_back(p);
    }
  }
  std::stable_sort(candidates_.begin(), candidates_.end(),
                   [](const Pattern &a, const Pattern &b) {
                     return a.frequency > b.frequency;
                   });
  Replay();
}

void ScreeningSession::Replay() {
  if (journal_path_.empty() || !FileExists(journal_path_)) return;
  ForEachJsonLine(journal_path_, [&](int line, const nlohmann::json &row) {
    if (row.at("relation").get<std::string>() != relation_) return;
    std::string pattern = row.at("pattern");
    Decision decision = ParseDecision(row.at("decision").get<std::string>());
    if (FindCandidate(pattern) == nullptr) {
      throw ParseError(journal_path_, line,
                       "journal decides unknown pattern '" + pattern + "'");
    }
    if (!decisions_.emplace(pattern, decision).second) {
      throw ParseError(journal_path_, line,
                       "journal decides '" + pattern + "' twice");
    }
    surfaced_.insert(pattern);
  });
}

const Pattern *ScreeningSession::FindCandidate(std::string_view text) const {
  for (const auto &p : candidates_) {
    if (p.Text() == text) return &p;
  }
  return nullptr;
}

std::optional<Candidate> ScreeningSession::Next() {
  if (!initialized_) throw SessionError("screening session not initialized");
  if (closed_) return std::nullopt;
  for (size_t i = 0; i < candidates_.size(); ++i) {
    std::string text = candidates_[i].Text();
    if (decisions_.count(text)) continue;
    surfaced_.insert(text);
    return Candidate{relation_, candidates_[i], i};
  }
  return std::nullopt;
}

bool ScreeningSession::done() const {
  return closed_ || decisions_.size() == candidates_.size();
}

void ScreeningSession::Decide(std::string_view pattern_text,
                              Decision decision) {
  if (!initialized_) throw SessionError("screening session not initialized");
  if (closed_) throw SessionError("screening session is closed");
  if (decisions_.count(pattern_text)) {
    throw ConflictError("pattern '" + std::string(pattern_text) +
                        "' already decided");
  }
  if (!surfaced_.count(pattern_text)) {
    throw SessionError("pattern '" + std::string(pattern_text) +
                       "' has not been presented");
  }
  std::string text(pattern_text);
  Append(text, decision);
  decisions_.emplace(std::move(text), decision);
}

void ScreeningSession::Append(const std::string &pattern, Decision decision) {
  if (journal_path_.empty()) return;
  nlohmann::ordered_json row;
  row["relation"] = relation_;
  row["pattern"] = pattern;
  row["decision"] = DecisionName(decision);
  row["timestamp"] = UtcTimestamp();
  std::string line = row.dump() + "\n";

  int fd = ::open(journal_path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw Error("cannot open journal " + journal_path_);
  ssize_t written = ::write(fd, line.data(), line.size());
  int synced = ::fsync(fd);
  ::close(fd);
  if (written != static_cast<ssize_t>(line.size()) || synced != 0) {
    throw Error("failed to persist decision to " + journal_path_);
  }
}

std::optional<Decision> ScreeningSession::DecisionFor(
    std::string_view pattern_text) const {
  auto it = decisions_.find(pattern_text);
  if (it == decisions_.end()) return std::nullopt;
  return it->second;
}

TemplateSet ScreeningSession::Templates(const Template &general) const {
  TemplateSet set;
  set.relation = relation_;
  set.templates.push_back({general.text, Provenance::kGeneral});
  for (const auto &p : candidates_) {
    auto d = DecisionFor(p.Text());
    if (d && *d == Decision::kAccept) {
      set.templates.push_back({p.Text(), Provenance::kMined});
    }
  }
  set.Validate();
  return set;
}

TemplateSet ScreeningSession::Finalize(const Template &general) {
  if (!initialized_) throw SessionError("screening session not initialized");
  closed_ = true;
  return Templates(general);
}

}  // namespace dsre
