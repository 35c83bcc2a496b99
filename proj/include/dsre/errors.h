#ifndef DSRE_ERRORS_H_
#define DSRE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dsre {

// Base class for all pipeline errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string &path, int line, const std::string &what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Span invariants violated while loading a corpus.
class SpanError : public ParseError {
 public:
  using ParseError::ParseError;
};
class OverlapError : public SpanError {
 public:
  using SpanError::SpanError;
};
class SpanRangeError : public SpanError {
 public:
  using SpanError::SpanError;
};

// Bad configuration: unknown relation ids, invalid thresholds, etc.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Template text without exactly one {subj} and one {obj}.
class TemplateError : public Error {
 public:
  using Error::Error;
};

// Two annotation sets disagree on the instance universe.
class UniverseMismatchError : public Error {
 public:
  using Error::Error;
};

// Remote NLI failures, kept distinct so callers can tell them apart.
class TransportError : public Error {
 public:
  using Error::Error;
};
class MalformedResponseError : public Error {
 public:
  using Error::Error;
};
class DistributionError : public Error {
 public:
  using Error::Error;
};

// Screening session state errors.
class SessionError : public Error {
 public:
  using Error::Error;
};
class ConflictError : public SessionError {
 public:
  using SessionError::SessionError;
};

// A pipeline stage ran before the artifact it depends on exists.
class MissingArtifactError : public Error {
 public:
  explicit MissingArtifactError(const std::string &artifact)
      : Error("missing prerequisite artifact: " + artifact),
        artifact_(artifact) {}
  const std::string &artifact() const { return artifact_; }

 private:
  std::string artifact_;
};

}  // namespace dsre

#endif  // DSRE_ERRORS_H_
