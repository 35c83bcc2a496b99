#ifndef DSRE_SCREENING_H_
#define DSRE_SCREENING_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dsre/sarv.h"
#include "dsre/schema.h"

namespace dsre {

enum class Decision { kAccept, kReject };

std::string_view DecisionName(Decision decision);
Decision ParseDecision(std::string_view name);

struct Candidate {
  std::string relation;
  Pattern pattern;
  size_t rank = 0;  // 0-based position among eligible patterns
};

// Manual screening of one relation's pruned patterns. Patterns with group
// frequency below the configured minimum are never shown. Every decision is
// appended to a JSON Lines journal and flushed to disk before it takes
// effect; reopening a session on the same journal replays earlier
// decisions for the relation.
class ScreeningSession {
 public:
  ScreeningSession() = default;
  ScreeningSession(const PatternSet &pruned, const SarvConfig &config,
                   std::string journal_path);

  bool initialized() const { return initialized_; }
  const std::string &relation() const { return relation_; }

  // Highest-ranked undecided candidate, or nullopt when every candidate is
  // decided or the session is closed. Throws SessionError when the session
  // was never initialized.
  std::optional<Candidate> Next();

  // Records a decision for a surfaced pattern. Throws ConflictError when the
  // pattern was already decided and SessionError when it was never
  // surfaced or the session is closed.
  void Decide(std::string_view pattern_text, Decision decision);

  void Close() { closed_ = true; }
  bool closed() const { return closed_; }
  bool done() const;

  size_t eligible() const { return candidates_.size(); }
  size_t decided() const { return decisions_.size(); }
  const std::vector<Pattern> &candidates() const { return candidates_; }
  std::optional<Decision> DecisionFor(std::string_view pattern_text) const;

  // General template followed by accepted patterns in rank order.
  TemplateSet Templates(const Template &general) const;

  // Closes the session and returns the final template set.
  TemplateSet Finalize(const Template &general);

 private:
  void Append(const std::string &pattern, Decision decision);
  void Replay();
  const Pattern *FindCandidate(std::string_view text) const;

  bool initialized_ = false;
  bool closed_ = false;
  std::string relation_;
  std::string journal_path_;
  std::vector<Pattern> candidates_;
  std::set<std::string, std::less<>> surfaced_;
  std::map<std::string, Decision, std::less<>> decisions_;
};

}  // namespace dsre

#endif  // DSRE_SCREENING_H_
